#include "store/atomic_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "fgis/error.hpp"
#include "fgis/evidence_store.hpp"

namespace fgis::store {
namespace fs = std::filesystem;

namespace {

struct FaultPlan {
  std::mutex mu;
  bool armed = false;
  std::size_t skip = 0;
  std::size_t partial = 0;
};

FaultPlan& fault_plan() {
  static FaultPlan plan;
  return plan;
}

// Returns the byte limit for this write when the fault fires.
std::optional<std::size_t> take_fault() {
  auto& p = fault_plan();
  std::lock_guard lock(p.mu);
  if (!p.armed) return std::nullopt;
  if (p.skip > 0) {
    --p.skip;
    return std::nullopt;
  }
  p.armed = false;
  return p.partial;
}

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      io_error("write failed");
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

namespace testing {

void arm_write_fault(std::size_t skip_writes, std::size_t partial_bytes) {
  auto& p = fault_plan();
  std::lock_guard lock(p.mu);
  p.armed = true;
  p.skip = skip_writes;
  p.partial = partial_bytes;
}

void disarm_write_fault() {
  auto& p = fault_plan();
  std::lock_guard lock(p.mu);
  p.armed = false;
}

}  // namespace testing

namespace detail {

void write_atomic(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory for " + path.filename().string());

  const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid()) + "-" +
                       std::to_string(temp_counter.fetch_add(1));
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot create temp file");

  if (const auto limit = take_fault()) {
    const std::size_t n = std::min(*limit, contents.size());
    try {
      write_all(fd, contents.data(), n);
    } catch (...) {
    }
    ::close(fd);
    throw Error(ErrorCode::IoError, "simulated crash during write of " + path.filename().string());
  }

  try {
    write_all(fd, contents.data(), contents.size());
  } catch (...) {
    ::close(fd);
    fs::remove(tmp, ec);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    fs::remove(tmp, ec);
    io_error("fsync failed");
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    fs::remove(tmp, ec);
    io_error("rename failed");
  }
  fsync_dir(path.parent_path());
}

std::optional<std::string> read_whole_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

bool is_temp_file(const fs::path& path) {
  return path.filename().string().find(".tmp-") != std::string::npos;
}

}  // namespace detail
}  // namespace fgis::store
