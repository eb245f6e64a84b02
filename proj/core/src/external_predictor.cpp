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

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace slideseg {

namespace {

int connect_tcp(const std::string& host, const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw TransportError("resolve " + host + ":" + port + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw TransportError("cannot connect to " + host + ":" + port);
  return fd;
}

}  // namespace

ExternalPredictor::ExternalPredictor(const std::string& endpoint) : endpoint_(endpoint) {
  if (endpoint.empty()) throw ParameterError("external predictor endpoint is empty");
  // A dead peer must surface as EPIPE, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);

  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string addr = endpoint.substr(4);
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) {
      throw ParameterError("tcp endpoint must be tcp:HOST:PORT; got '" + endpoint + "'");
    }
    read_fd_ = connect_tcp(addr.substr(0, colon), addr.substr(colon + 1));
    write_fd_ = read_fd_;
    return;
  }

  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) {
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw TransportError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", endpoint.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  write_fd_ = to_child[1];
  read_fd_ = from_child[0];
  child_pid_ = pid;
}

ExternalPredictor::~ExternalPredictor() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  if (child_pid_ > 0) {
    int status = 0;
    while (::waitpid(child_pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }
}

void ExternalPredictor::predict(const ImageView& tile, TissueClass cls, Magnification mag,
                                const TileContext&, Image& out) {
  std::lock_guard lock(mutex_);
  if (read_fd_ < 0) throw TransportError("predictor connection already failed");
  wire::Channel ch(read_fd_, write_fd_);
  wire::Response resp;
  try {
    ch.write_all(wire::encode_request(tile, cls, mag));
    resp = wire::read_response(ch);
  } catch (const TransportError&) {
    // The stream position is unknown after a failed exchange.
    if (write_fd_ != read_fd_) ::close(write_fd_);
    ::close(read_fd_);
    read_fd_ = write_fd_ = -1;
    throw;
  }
  if (resp.status != 0) {
    throw PredictionError("predictor returned status " + std::to_string(resp.status) + ": " +
                          resp.message);
  }
  if (resp.height != tile.height || resp.width != tile.width) {
    throw TransportError("malformed frame: response is " + std::to_string(resp.width) + "x" +
                         std::to_string(resp.height) + ", request was " +
                         std::to_string(tile.width) + "x" + std::to_string(tile.height));
  }
  for (std::uint8_t v : resp.mask) {
    if (v > 1) throw TransportError("malformed frame: mask value " + std::to_string(v));
  }
  std::copy(resp.mask.begin(), resp.mask.end(), out.data().begin());
}

}  // namespace slideseg
