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
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "slideseg/raster.hpp"
#include "slideseg/tile_inference.hpp"

namespace slideseg::wire {

// Framing (all integers little-endian):
//   request : "OSEG" u8 version=1 u8 msg=1 u8 class u8 mag u16 height u16 width
//             payload height*width*3 RGB bytes
//   response: "OSEG" u8 version=1 u8 msg=2 u8 status u16 height u16 width
//             status == 0: payload height*width bytes in {0,1}
//             status != 0: u16 length + UTF-8 message
inline constexpr std::array<std::uint8_t, 4> kMagic = {'O', 'S', 'E', 'G'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint8_t kMsgRequest = 1;
inline constexpr std::uint8_t kMsgResponse = 2;
inline constexpr std::size_t kRequestHeaderSize = 12;
inline constexpr std::size_t kResponseHeaderSize = 11;

struct Request {
  TissueClass cls = TissueClass::TUFT;
  Magnification mag = Magnification::k40;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;
};

struct Response {
  std::uint8_t status = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> mask;
  std::string message;
};

std::vector<std::uint8_t> encode_request(const ImageView& tile, TissueClass cls,
                                         Magnification mag);
std::vector<std::uint8_t> encode_response(const Response& response);

/// Blocking byte stream over a pair of file descriptors (pipe ends or one
/// socket). Failures raise TransportError.
class Channel {
 public:
  Channel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void write_all(const std::uint8_t* data, std::size_t size);
  void write_all(const std::vector<std::uint8_t>& bytes) { write_all(bytes.data(), bytes.size()); }
  /// Returns false on clean EOF before the first byte; throws on EOF mid-read.
  bool read_exact(std::uint8_t* data, std::size_t size);

 private:
  int read_fd_;
  int write_fd_;
};

/// Reads one request; std::nullopt on clean EOF at a frame boundary.
std::optional<Request> read_request(Channel& ch);
Response read_response(Channel& ch);

/// Serves requests from in_fd with the given predictor until EOF. Predictor
/// failures become status-1 responses. Malformed requests raise
/// TransportError after replying with status 2.
void serve(int in_fd, int out_fd, Predictor& predictor);

/// Listening TCP socket on host:port (port 0 picks an ephemeral port).
class TcpListener {
 public:
  TcpListener(const std::string& host, int port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const noexcept { return port_; }
  /// Blocks for one connection and returns its descriptor.
  int accept_one();

 private:
  int fd_ = -1;
  int port_ = 0;
};

}  // namespace slideseg::wire

namespace slideseg {

/// Predictor backed by an external model process speaking the wire protocol.
/// Endpoint "tcp:HOST:PORT" connects to a socket peer; anything else is run as
/// a shell command whose stdin/stdout carry the frames. Calls are serialised.
class ExternalPredictor final : public Predictor {
 public:
  explicit ExternalPredictor(const std::string& endpoint);
  ~ExternalPredictor() override;

  ExternalPredictor(const ExternalPredictor&) = delete;
  ExternalPredictor& operator=(const ExternalPredictor&) = delete;

  void predict(const ImageView& tile, TissueClass cls, Magnification mag,
               const TileContext& ctx, Image& out) override;
  std::string name() const override { return "external:" + endpoint_; }

 private:
  std::string endpoint_;
  int read_fd_ = -1;
  int write_fd_ = -1;
  int child_pid_ = -1;
  std::mutex mutex_;
};

}  // namespace slideseg
