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
// slideseg-predictor: reference model process for the external predictor
// wire protocol. Serves on stdin/stdout by default, or on a TCP port.
//
//   --mode stub        green-channel stub (same as the in-process stub)
//   --mode ones|zeros  constant maps
//   --mode fail        every request answered with a non-zero status
//   --mode bad-magic   replies with a corrupted frame magic
//   --mode bad-version replies with protocol version 99

#include <unistd.h>

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "slideseg/wire_protocol.hpp"

namespace {

class FailingPredictor final : public slideseg::Predictor {
 public:
  void predict(const slideseg::ImageView&, slideseg::TissueClass, slideseg::Magnification,
               const slideseg::TileContext&, slideseg::Image&) override {
    throw std::runtime_error("model failure (test mode)");
  }
  std::string name() const override { return "fail"; }
};

// Answers every request with a well-sized but corrupted frame.
void serve_corrupt(int in_fd, int out_fd, bool bad_magic) {
  slideseg::wire::Channel ch(in_fd, out_fd);
  while (auto req = slideseg::wire::read_request(ch)) {
    slideseg::wire::Response r;
    r.height = req->height;
    r.width = req->width;
    r.mask.assign(static_cast<std::size_t>(r.height) * r.width, 1);
    auto bytes = slideseg::wire::encode_response(r);
    if (bad_magic) {
      bytes[0] = 'X';
    } else {
      bytes[4] = 99;
    }
    ch.write_all(bytes);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slideseg-predictor - wire-protocol predictor server"};
  std::string mode = "stub";
  std::string listen;
  app.add_option("--mode", mode)->check(
      CLI::IsMember({"stub", "ones", "zeros", "fail", "bad-magic", "bad-version"}));
  app.add_option("--listen", listen, "HOST:PORT to serve over TCP instead of stdio");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<slideseg::Predictor> predictor;
  if (mode == "stub") predictor = std::make_unique<slideseg::StubPredictor>();
  else if (mode == "ones") predictor = std::make_unique<slideseg::ConstantPredictor>(1);
  else if (mode == "zeros") predictor = std::make_unique<slideseg::ConstantPredictor>(0);
  else if (mode == "fail") predictor = std::make_unique<FailingPredictor>();

  auto serve_fds = [&](int in_fd, int out_fd) {
    if (predictor) {
      slideseg::wire::serve(in_fd, out_fd, *predictor);
    } else {
      serve_corrupt(in_fd, out_fd, mode == "bad-magic");
    }
  };

  try {
    if (listen.empty()) {
      serve_fds(STDIN_FILENO, STDOUT_FILENO);
      return 0;
    }
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
      std::cerr << "--listen expects HOST:PORT\n";
      return 2;
    }
    slideseg::wire::TcpListener listener(listen.substr(0, colon),
                                         std::stoi(listen.substr(colon + 1)));
    std::cout << "listening " << listener.port() << std::endl;
    for (;;) {
      const int fd = listener.accept_one();
      try {
        serve_fds(fd, fd);
      } catch (const std::exception& e) {
        std::cerr << "connection error: " << e.what() << "\n";
      }
      ::close(fd);
    }
  } catch (const std::exception& e) {
    std::cerr << "slideseg-predictor: " << e.what() << "\n";
    return 4;
  }
}
