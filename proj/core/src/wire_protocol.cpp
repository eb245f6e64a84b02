// Copyright 2026 The slideseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "slideseg/wire_protocol.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace slideseg::wire {

namespace {

void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

int get_u16(const std::uint8_t* p) { return p[0] | (p[1] << 8); }

void check_magic(const std::uint8_t* header) {
  if (std::memcmp(header, kMagic.data(), kMagic.size()) != 0) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%02x %02x %02x %02x", header[0], header[1], header[2],
                  header[3]);
    throw TransportError(std::string("malformed frame: bad magic [") + hex + "]");
  }
  if (header[4] != kVersion) {
    throw TransportError("protocol version mismatch: peer sent " + std::to_string(header[4]) +
                         ", expected " + std::to_string(kVersion));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_request(const ImageView& tile, TissueClass cls,
                                         Magnification mag) {
  if (tile.channels != 3) throw ParameterError("wire requests carry RGB tiles");
  if (tile.width <= 0 || tile.height <= 0 || tile.width > 0xFFFF || tile.height > 0xFFFF) {
    throw ParameterError("tile dimensions do not fit the wire header");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kRequestHeaderSize + static_cast<std::size_t>(tile.width) * tile.height * 3);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(kMsgRequest);
  out.push_back(static_cast<std::uint8_t>(class_index(cls)));
  out.push_back(static_cast<std::uint8_t>(mag_value(mag)));
  put_u16(out, tile.height);
  put_u16(out, tile.width);
  for (int y = 0; y < tile.height; ++y) {
    out.insert(out.end(), tile.row(y), tile.row(y) + tile.width * 3);
  }
  return out;
}

std::vector<std::uint8_t> encode_response(const Response& r) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(kMsgResponse);
  out.push_back(r.status);
  put_u16(out, r.height);
  put_u16(out, r.width);
  if (r.status == 0) {
    out.insert(out.end(), r.mask.begin(), r.mask.end());
  } else {
    const std::size_t len = std::min<std::size_t>(r.message.size(), 0xFFFF);
    put_u16(out, static_cast<int>(len));
    out.insert(out.end(), r.message.begin(), r.message.begin() + static_cast<std::ptrdiff_t>(len));
  }
  return out;
}

void Channel::write_all(const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::write(write_fd_, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("write to predictor failed: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

bool Channel::read_exact(std::uint8_t* data, std::size_t size) {
  std::size_t got = 0;
  while (got < size) {
    const ssize_t n = ::read(read_fd_, data + got, size - got);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("read from peer failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (got == 0) return false;
      throw TransportError("connection closed mid-frame after " + std::to_string(got) + " of " +
                           std::to_string(size) + " bytes");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<Request> read_request(Channel& ch) {
  std::uint8_t h[kRequestHeaderSize];
  if (!ch.read_exact(h, sizeof(h))) return std::nullopt;
  check_magic(h);
  if (h[5] != kMsgRequest) {
    throw TransportError("malformed frame: expected request, got msg " + std::to_string(h[5]));
  }
  Request r;
  if (h[6] >= kTissueClasses.size()) {
    throw TransportError("malformed frame: class index " + std::to_string(h[6]));
  }
  r.cls = static_cast<TissueClass>(h[6]);
  try {
    r.mag = parse_magnification(h[7]);
  } catch (const ParameterError&) {
    throw TransportError("malformed frame: magnification " + std::to_string(h[7]));
  }
  r.height = get_u16(h + 8);
  r.width = get_u16(h + 10);
  r.rgb.resize(static_cast<std::size_t>(r.height) * r.width * 3);
  if (!r.rgb.empty() && !ch.read_exact(r.rgb.data(), r.rgb.size())) {
    throw TransportError("connection closed before request payload");
  }
  return r;
}

Response read_response(Channel& ch) {
  std::uint8_t h[kResponseHeaderSize];
  if (!ch.read_exact(h, sizeof(h))) {
    throw TransportError("predictor closed the connection");
  }
  check_magic(h);
  if (h[5] != kMsgResponse) {
    throw TransportError("malformed frame: expected response, got msg " + std::to_string(h[5]));
  }
  Response r;
  r.status = h[6];
  r.height = get_u16(h + 7);
  r.width = get_u16(h + 9);
  if (r.status == 0) {
    r.mask.resize(static_cast<std::size_t>(r.height) * r.width);
    if (!r.mask.empty() && !ch.read_exact(r.mask.data(), r.mask.size())) {
      throw TransportError("connection closed before response payload");
    }
  } else {
    std::uint8_t len[2];
    if (!ch.read_exact(len, 2)) throw TransportError("connection closed before error message");
    r.message.resize(static_cast<std::size_t>(get_u16(len)));
    if (!r.message.empty() &&
        !ch.read_exact(reinterpret_cast<std::uint8_t*>(r.message.data()), r.message.size())) {
      throw TransportError("connection closed inside error message");
    }
  }
  return r;
}

void serve(int in_fd, int out_fd, Predictor& predictor) {
  Channel ch(in_fd, out_fd);
  for (;;) {
    std::optional<Request> req;
    try {
      req = read_request(ch);
    } catch (const TransportError& e) {
      Response err;
      err.status = 2;
      err.message = e.what();
      try {
        ch.write_all(encode_response(err));
      } catch (const TransportError&) {
      }
      throw;
    }
    if (!req) return;
    Response resp;
    resp.height = req->height;
    resp.width = req->width;
    try {
      Image tile(req->width, req->height, 3);
      std::copy(req->rgb.begin(), req->rgb.end(), tile.data().begin());
      Image out(req->width, req->height, 1);
      predictor.predict(view(tile), req->cls, req->mag, TileContext{}, out);
      resp.mask.assign(out.data().begin(), out.data().end());
    } catch (const std::exception& e) {
      resp.status = 1;
      resp.message = e.what();
    }
    ch.write_all(encode_response(resp));
  }
}

TcpListener::TcpListener(const std::string& host, int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw ParameterError("listen address must be an IPv4 literal: '" + host + "'");
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 4) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    throw TransportError("bind/listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

int TcpListener::accept_one() {
  for (;;) {
    const int c = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (c >= 0) return c;
    if (errno != EINTR) throw TransportError(std::string("accept: ") + std::strerror(errno));
  }
}

}  // namespace slideseg::wire
