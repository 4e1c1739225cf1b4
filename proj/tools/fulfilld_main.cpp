// fulfilld: newline-delimited JSON decision service over stdio or a local
// stream socket, with an optional append-only journal and a replay checker.
//
//   fulfilld --stdio [--journal <file>]
//   fulfilld --socket <path> [--journal <file>]
//   fulfilld --replay <journal>
//
// One JSON request per line, one JSON response per line.  The journal holds
// the request objects with {ts, response} appended, so `--replay` can verify
// that a fresh engine reproduces every recorded response (ts is ignored).
// Exit codes: 0 success, 1 replay mismatch or runtime failure, 2 bad usage.

#include <csignal>
#include <cstdint>
#include <cstring>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "fulfill/capi.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  ff_string_free(s);
  return out;
}

std::string handle(ff_service* svc, const std::string& line) {
  char* resp = nullptr;
  ff_service_handle_line(svc, line.c_str(), &resp);  // always FF_OK
  return take(resp);
}

// ---------------------------------------------------------------------------
// Journal

class Journal {
 public:
  explicit Journal(const std::string& path) {
    if (path.empty()) return;
    os_.open(path, std::ios::binary | std::ios::app);
    if (!os_) throw std::runtime_error("cannot open journal " + path);
    enabled_ = true;
  }

  void record(const std::string& request_line, const std::string& response) {
    if (!enabled_) return;
    json entry = json::parse(request_line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object())
      entry = json{{"raw", request_line}};  // keep unparseable requests replayable
    entry["ts"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
    entry["response"] = json::parse(response);
    std::lock_guard<std::mutex> g(mu_);
    os_ << entry.dump() << "\n" << std::flush;
  }

 private:
  bool enabled_ = false;
  std::ofstream os_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// stdio mode

int serve_stdio(ff_service* svc, Journal& journal) {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    std::string resp = handle(svc, line);
    journal.record(line, resp);
    std::cout << resp << "\n" << std::flush;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// socket mode

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

bool write_all(int fd, const std::string& data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t w = ::write(fd, data.data() + off, data.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += size_t(w);
  }
  return true;
}

void serve_connection(int fd, ff_service* svc, Journal* journal) {
  std::string buf;
  char chunk[65536];
  for (;;) {
    ssize_t r = ::read(fd, chunk, sizeof chunk);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    buf.append(chunk, size_t(r));
    size_t start = 0, nl;
    while ((nl = buf.find('\n', start)) != std::string::npos) {
      std::string line = buf.substr(start, nl - start);
      start = nl + 1;
      if (line.empty()) continue;
      std::string resp = handle(svc, line);
      journal->record(line, resp);
      if (!write_all(fd, resp + "\n")) {
        ::close(fd);
        return;
      }
    }
    buf.erase(0, start);
  }
  // be liberal about a final unterminated line
  if (!buf.empty()) {
    std::string resp = handle(svc, buf);
    journal->record(buf, resp);
    write_all(fd, resp + "\n");
  }
  ::close(fd);
}

int serve_socket(ff_service* svc, Journal& journal, const std::string& path) {
  ::signal(SIGPIPE, SIG_IGN);
  // sigaction without SA_RESTART so a signal interrupts the blocking accept
  struct sigaction sa{};
  sa.sa_handler = on_signal;
  ::sigaction(SIGINT, &sa, nullptr);
  ::sigaction(SIGTERM, &sa, nullptr);

  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) {
    std::cerr << "error: socket: " << std::strerror(errno) << "\n";
    return 1;
  }
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) {
    std::cerr << "error: socket path too long\n";
    return 2;
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  ::unlink(path.c_str());  // stale socket from an earlier run
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(fd, 16) < 0) {
    std::cerr << "error: bind/listen " << path << ": " << std::strerror(errno)
              << "\n";
    ::close(fd);
    return 1;
  }
  std::cerr << "listening on " << path << "\n";

  // Poll with a timeout instead of blocking in accept: the stop signal can
  // land on any thread, and closing the fd would not wake a blocked accept.
  std::vector<std::thread> clients;
  while (!g_stop) {
    pollfd pfd{fd, POLLIN, 0};
    int pr = ::poll(&pfd, 1, 200);
    if (pr < 0 && errno != EINTR) break;
    if (pr <= 0 || !(pfd.revents & POLLIN)) continue;
    int conn = ::accept(fd, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    clients.emplace_back(serve_connection, conn, svc, &journal);
  }
  for (auto& t : clients) t.join();
  ::close(fd);
  ::unlink(path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// replay

int replay(ff_service* svc, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    std::cerr << "error: cannot read " << path << "\n";
    return 2;
  }
  std::string line;
  long long lineno = 0, checked = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object() || !entry.contains("response")) {
      std::cerr << "error: " << path << ":" << lineno
                << ": not a journal entry\n";
      return 2;
    }
    json recorded = entry["response"];
    std::string request;
    if (entry.contains("raw")) {
      request = entry["raw"].get<std::string>();
    } else {
      entry.erase("ts");
      entry.erase("response");
      request = entry.dump();
    }
    json fresh = json::parse(handle(svc, request));
    if (fresh != recorded) {
      std::cerr << "replay mismatch at " << path << ":" << lineno << "\n"
                << "  recorded: " << recorded.dump() << "\n"
                << "  fresh:    " << fresh.dump() << "\n";
      return 1;
    }
    ++checked;
  }
  std::cout << "replay ok: " << checked << " requests\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fulfillment decision service"};
  bool stdio = false;
  std::string socket_path, journal_path, replay_path;
  app.add_flag("--stdio", stdio, "serve on standard input/output");
  app.add_option("--socket", socket_path, "serve on a unix stream socket");
  app.add_option("--journal", journal_path, "append requests + responses here");
  app.add_option("--replay", replay_path, "verify a journal against a fresh engine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const int modes = int(stdio) + int(!socket_path.empty()) + int(!replay_path.empty());
  if (modes != 1) {
    std::cerr << "error: pick exactly one of --stdio, --socket, --replay\n";
    return 2;
  }
  if (!replay_path.empty() && !journal_path.empty()) {
    std::cerr << "error: --replay does not write a journal\n";
    return 2;
  }

  ff_service* svc = nullptr;
  if (ff_service_new(&svc) != FF_OK) {
    std::cerr << "error: " << ff_last_error() << "\n";
    return 1;
  }

  int rc = 1;
  try {
    Journal journal(journal_path);
    if (stdio)
      rc = serve_stdio(svc, journal);
    else if (!socket_path.empty())
      rc = serve_socket(svc, journal, socket_path);
    else
      rc = replay(svc, replay_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 1;
  }
  ff_service_free(svc);
  return rc;
}
