// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>

#include "json.hpp"
#include "n2r/suts.hpp"

namespace n2r {

namespace {

// Writing into a dead child's pipe must surface as EPIPE, not SIGPIPE.
const bool kSigpipeIgnored = [] {
  std::signal(SIGPIPE, SIG_IGN);
  return true;
}();

constexpr char kB64Table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= len; i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back(kB64Table[(v >> 6) & 63]);
    out.push_back(kB64Table[v & 63]);
  }
  if (i + 1 == len) {
    const std::uint32_t v = data[i] << 16;
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == len) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back(kB64Table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

struct ExternalSut::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;  // bytes read past the last newline

  ~Process() { shutdown(); }

  void shutdown() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
    if (pid > 0) {
      ::kill(pid, SIGTERM);
      int status = 0;
      if (::waitpid(pid, &status, WNOHANG) == 0) {
        ::usleep(50 * 1000);
        if (::waitpid(pid, &status, WNOHANG) == 0) {
          ::kill(pid, SIGKILL);
          ::waitpid(pid, &status, 0);
        }
      }
      pid = -1;
    }
  }
};

ExternalSut::ExternalSut(std::string name, SutTask task, std::string command,
                         double timeout_seconds, int max_points)
    : command_(std::move(command)), timeout_seconds_(timeout_seconds) {
  (void)kSigpipeIgnored;
  desc_ = SutDescriptor{std::move(name), task, max_points};
  desc_.validate();
  if (command_.empty()) throw ConfigError("external sut: empty command");
}

ExternalSut::~ExternalSut() = default;

void ExternalSut::ensure_running() {
  if (process_ && process_->pid > 0) return;
  process_ = std::make_unique<Process>();

  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
    throw SutCrashed(desc_.name + ": cannot create pipes");

  const pid_t pid = ::fork();
  if (pid < 0) throw SutCrashed(desc_.name + ": fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ::close(to_child[0]);
  ::close(from_child[1]);
  process_->pid = pid;
  process_->to_child = to_child[1];
  process_->from_child = from_child[0];
}

SutOutput ExternalSut::run(const ImageBuffer& image) {
  ensure_running();
  const std::uint64_t id = next_id_++;

  std::vector<std::uint8_t> rgb8;
  rgb8.reserve(image.pixels.size());
  for (float v : image.pixels) rgb8.push_back(quantize8(v));

  nlohmann::json request = {{"id", id},
                            {"task", to_string(desc_.task)},
                            {"width", image.width},
                            {"height", image.height},
                            {"pixels_b64", base64_encode(rgb8.data(), rgb8.size())}};
  std::string line = request.dump();
  line.push_back('\n');

  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n =
        ::write(process_->to_child, line.data() + written, line.size() - written);
    if (n <= 0) {
      process_->shutdown();
      throw SutCrashed(desc_.name + ": child closed its stdin");
    }
    written += static_cast<std::size_t>(n);
  }

  // Read one reply line within the deadline.
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds_);
  std::string reply;
  for (;;) {
    const auto nl = process_->buffer.find('\n');
    if (nl != std::string::npos) {
      reply = process_->buffer.substr(0, nl);
      process_->buffer.erase(0, nl + 1);
      break;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      process_->shutdown();
      throw SutTimeout(desc_.name + ": no reply within the timeout");
    }
    struct pollfd pfd {
      process_->from_child, POLLIN, 0
    };
    const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (pr < 0) {
      process_->shutdown();
      throw SutCrashed(desc_.name + ": poll failed");
    }
    if (pr == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(process_->from_child, chunk, sizeof(chunk));
    if (n <= 0) {
      process_->shutdown();
      throw SutCrashed(desc_.name + ": child exited without replying");
    }
    process_->buffer.append(chunk, static_cast<std::size_t>(n));
  }

  nlohmann::json parsed = nlohmann::json::parse(reply, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw SutCrashed(desc_.name + ": malformed reply");
  if (!parsed.contains("id") || parsed.at("id").get<std::uint64_t>() != id)
    throw SutCrashed(desc_.name + ": reply id mismatch");

  try {
    if (desc_.task == SutTask::classify) {
      if (!parsed.contains("probs")) throw SutCrashed(desc_.name + ": reply lacks probs");
      Classification cls;
      cls.probs = parsed.at("probs").get<std::vector<double>>();
      return SutOutput{std::move(cls)};
    }
    if (!parsed.contains("points")) throw SutCrashed(desc_.name + ": reply lacks points");
    InterestPoints pts;
    for (const auto& row : parsed.at("points")) {
      if (!row.is_array() || row.size() != 3)
        throw SutCrashed(desc_.name + ": malformed point row");
      pts.points.push_back(
          InterestPoint{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return SutOutput{std::move(pts)};
  } catch (const nlohmann::json::exception&) {
    throw SutCrashed(desc_.name + ": malformed reply payload");
  }
}

}  // namespace n2r
