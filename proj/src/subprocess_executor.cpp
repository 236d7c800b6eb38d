// Copyright 2026 The catbij Authors.
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

#include "catbij/subprocess_executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <fmt/format.h>

#include "catbij/wire.hpp"

namespace catbij {

namespace {

constexpr std::size_t kStderrTail = 64 * 1024;

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
};

void make_pipe(Fd& read_end, Fd& write_end) {
    int p[2];
    if (::pipe2(p, O_CLOEXEC) != 0) throw ExecutorFailure(fmt::format("pipe failed: {}", std::strerror(errno)));
    read_end.fd = p[0];
    write_end.fd = p[1];
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

using Clock = std::chrono::steady_clock;

int ms_until(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1000));
}

}  // namespace

SubprocessExecutor::SubprocessExecutor(SubprocessOptions options) : options_(std::move(options)) {
    if (options_.argv.empty()) throw std::invalid_argument("runner command is empty");
    // A runner that exits before reading its request must not kill us on write.
    ::signal(SIGPIPE, SIG_IGN);
}

ExecutionReply SubprocessExecutor::execute(const ExecutionRequest& request) {
    validate_request(request);
    const std::string payload = wire::encode_request(request);

    Fd in_r, in_w, out_r, out_w, err_r, err_w;
    make_pipe(in_r, in_w);
    make_pipe(out_r, out_w);
    make_pipe(err_r, err_w);

    std::vector<char*> argv;
    for (const auto& a : options_.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    const rlim_t as_limit = options_.memory_headroom_mb > 0
                                ? static_cast<rlim_t>(request.limits.memory_limit_mb + options_.memory_headroom_mb) << 20
                                : RLIM_INFINITY;

    const pid_t pid = ::fork();
    if (pid < 0) throw ExecutorFailure(fmt::format("fork failed: {}", std::strerror(errno)));
    if (pid == 0) {
        // Child: only async-signal-safe calls until exec.
        ::setpgid(0, 0);
        ::dup2(in_r.fd, STDIN_FILENO);
        ::dup2(out_w.fd, STDOUT_FILENO);
        ::dup2(err_w.fd, STDERR_FILENO);
        if (as_limit != RLIM_INFINITY) {
            rlimit rl{as_limit, as_limit};
            ::setrlimit(RLIMIT_AS, &rl);
        }
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // also from the parent, so the group exists before any kill
    in_r.reset();
    out_w.reset();
    err_w.reset();
    set_nonblocking(in_w.fd);
    set_nonblocking(out_r.fd);
    set_nonblocking(err_r.fd);

    const auto deadline = Clock::now() + std::chrono::milliseconds(request.limits.total_timeout_ms) + options_.grace;
    std::size_t written = 0;
    std::string out_buf;
    last_stderr_.clear();
    bool killed = false;
    bool oversized = false;

    // The reply is complete once the header and every record have arrived,
    // even if a straggler still holds the pipe open.
    auto reply_complete = [&] {
        const auto first = out_buf.find('\n');
        if (first == std::string::npos) return false;
        try {
            if (!wire::decode_header(std::string_view(out_buf).substr(0, first)).syntax_ok) return true;
        } catch (const wire::WireError&) {
            return true;
        }
        return static_cast<std::size_t>(std::count(out_buf.begin(), out_buf.end(), '\n')) >= request.inputs.size() + 1;
    };

    while (out_r.fd >= 0 || err_r.fd >= 0) {
        pollfd fds[3];
        int n = 0;
        int in_slot = -1, out_slot = -1, err_slot = -1;
        if (in_w.fd >= 0) fds[in_slot = n++] = {in_w.fd, POLLOUT, 0};
        if (out_r.fd >= 0) fds[out_slot = n++] = {out_r.fd, POLLIN, 0};
        if (err_r.fd >= 0) fds[err_slot = n++] = {err_r.fd, POLLIN, 0};

        if (Clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            killed = true;
            break;
        }
        const int rc = ::poll(fds, static_cast<nfds_t>(n), ms_until(deadline));
        if (rc < 0 && errno != EINTR) break;
        if (rc <= 0) continue;

        if (in_slot >= 0 && fds[in_slot].revents) {
            if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
                in_w.reset();
            } else {
                const auto k = ::write(in_w.fd, payload.data() + written, payload.size() - written);
                if (k > 0) written += static_cast<std::size_t>(k);
                if (k < 0 && errno != EAGAIN) in_w.reset();
                if (written == payload.size()) in_w.reset();
            }
        }
        char buf[65536];
        if (out_slot >= 0 && fds[out_slot].revents) {
            const auto k = ::read(out_r.fd, buf, sizeof buf);
            if (k > 0) {
                out_buf.append(buf, static_cast<std::size_t>(k));
                // Bound memory: one header plus one record per input, each capped.
                if (out_buf.size() > (request.inputs.size() + 1) * wire::kMaxMessageBytes) {
                    ::kill(-pid, SIGKILL);
                    oversized = true;
                    break;
                }
            } else if (k == 0 || errno != EAGAIN) {
                out_r.reset();
            }
            if (reply_complete()) break;
        }
        if (err_slot >= 0 && fds[err_slot].revents) {
            const auto k = ::read(err_r.fd, buf, sizeof buf);
            if (k > 0) {
                last_stderr_.append(buf, static_cast<std::size_t>(k));
                if (last_stderr_.size() > kStderrTail) last_stderr_.erase(0, last_stderr_.size() - kStderrTail);
            } else if (k == 0 || errno != EAGAIN) {
                err_r.reset();
            }
        }
    }

    int status = 0;
    const auto reap_by = reply_complete() ? std::min(deadline, Clock::now() + std::chrono::milliseconds(500)) : deadline;
    while (true) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid || (r < 0 && errno != EINTR)) break;
        if (r == 0 && Clock::now() >= reap_by) {
            ::kill(-pid, SIGKILL);
            killed = true;
            while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
            }
            break;
        }
        if (r == 0) ::usleep(2000);
    }
    // Stragglers in the group (children of the runner) go too.
    ::kill(-pid, SIGKILL);
    if (oversized) throw ExecutorFailure("runner output exceeds the protocol size limit");

    // Split complete lines; a trailing partial line is dropped.
    std::vector<std::string_view> lines;
    std::string_view view(out_buf);
    for (std::size_t pos = 0; pos < view.size();) {
        const auto nl = view.find('\n', pos);
        if (nl == std::string_view::npos) break;
        if (nl > pos) lines.push_back(view.substr(pos, nl - pos));
        pos = nl + 1;
    }

    const bool clean_exit = !killed && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    auto crash = [&](const std::string& why) {
        std::string detail = why;
        if (WIFSIGNALED(status)) detail += fmt::format(" (signal {})", WTERMSIG(status));
        else if (WIFEXITED(status)) detail += fmt::format(" (exit {})", WEXITSTATUS(status));
        return ExecutorFailure("runner failed: " + detail);
    };

    ExecutionReply reply;
    if (lines.empty()) {
        if (!killed) throw crash("no reply header");
        reply.syntax_ok = true;
        reply.message = "runner killed at the total deadline before replying";
        for (std::size_t i = 0; i < request.inputs.size(); ++i) reply.records.push_back(OutputRecord::timeout(static_cast<int>(i)));
        return reply;
    }

    const auto header = wire::decode_header(lines.front());
    reply.syntax_ok = header.syntax_ok;
    reply.runner_version = header.runner_version;
    reply.message = header.message;
    if (!reply.syntax_ok) return reply;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto rec = wire::decode_record(lines[i]);
        if (rec.input_index != static_cast<int>(reply.records.size()))
            throw wire::WireError(fmt::format("record index {} out of order, expected {}", rec.input_index,
                                              reply.records.size()));
        if (reply.records.size() == request.inputs.size()) throw wire::WireError("more records than inputs");
        reply.records.push_back(std::move(rec));
    }
    if (reply.records.size() < request.inputs.size()) {
        if (!killed && !clean_exit) throw crash(fmt::format("reply ended after {} of {} records", reply.records.size(),
                                                            request.inputs.size()));
        if (!killed) throw wire::WireError("runner exited without replying to every input");
        for (auto i = reply.records.size(); i < request.inputs.size(); ++i)
            reply.records.push_back(OutputRecord::timeout(static_cast<int>(i)));
        reply.message = "runner killed at the total deadline";
    }
    return reply;
}

}  // namespace catbij
