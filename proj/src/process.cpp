#include "oraclegen/process.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <pthread.h>
#include <sys/wait.h>
#include <unistd.h>

#include "oraclegen/error.hpp"

namespace oraclegen::process {

namespace {

struct Pipe {
    int fd[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) throw EnvironmentError(std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fd[0] >= 0) ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0) ::close(fd[1]);
        fd[1] = -1;
    }
};

// write(2) that reports EPIPE instead of raising SIGPIPE in this process.
ssize_t write_no_sigpipe(int fd, const char* data, std::size_t len) {
    sigset_t pipe_set, old;
    sigemptyset(&pipe_set);
    sigaddset(&pipe_set, SIGPIPE);
    sigset_t pending;
    sigpending(&pending);
    bool was_pending = sigismember(&pending, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &pipe_set, &old);
    ssize_t w = ::write(fd, data, len);
    int saved = errno;
    if (w < 0 && saved == EPIPE && !was_pending) {
        timespec zero{0, 0};
        while (sigtimedwait(&pipe_set, nullptr, &zero) < 0 && errno == EINTR) {
        }
    }
    pthread_sigmask(SIG_SETMASK, &old, nullptr);
    errno = saved;
    return w;
}

}  // namespace

Result run(const std::vector<std::string>& argv, const std::string& input, std::chrono::milliseconds timeout,
           const std::filesystem::path& cwd) {
    if (argv.empty()) throw EnvironmentError("empty command");
    Result res;
    auto start = std::chrono::steady_clock::now();

    Pipe in, out, err, status;
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    std::string dir = cwd.string();

    pid_t pid = ::fork();
    if (pid < 0) throw EnvironmentError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in.fd[0], 0);
        ::dup2(out.fd[1], 1);
        ::dup2(err.fd[1], 2);
        if (!dir.empty() && ::chdir(dir.c_str()) != 0) {
            int e = errno;
            (void)!::write(status.fd[1], &e, sizeof e);
            ::_exit(127);
        }
        ::signal(SIGPIPE, SIG_DFL);
        ::execvp(args[0], args.data());
        int e = errno;
        (void)!::write(status.fd[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    in.close_read();
    out.close_write();
    err.close_write();
    status.close_write();

    int e = 0;
    if (::read(status.fd[0], &e, sizeof e) == static_cast<ssize_t>(sizeof e)) res.spawn_errno = e;

    ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);
    std::size_t written = 0;
    if (input.empty() || res.spawn_errno) in.close_write();

    auto deadline = start + timeout;
    char buf[8192];
    while (out.fd[0] >= 0 || err.fd[0] >= 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            res.timed_out = true;
            ::kill(-pid, SIGKILL);
            break;
        }
        pollfd fds[3];
        int n = 0;
        int idx_out = -1, idx_err = -1, idx_in = -1;
        if (out.fd[0] >= 0) fds[idx_out = n++] = {out.fd[0], POLLIN, 0};
        if (err.fd[0] >= 0) fds[idx_err = n++] = {err.fd[0], POLLIN, 0};
        if (in.fd[1] >= 0) fds[idx_in = n++] = {in.fd[1], POLLOUT, 0};
        int wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
        int r = ::poll(fds, n, wait_ms);
        if (r < 0) {
            if (errno == EINTR) continue;
            break;
        }
        auto drain = [&](int idx, Pipe& p, std::string& sink) {
            if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
            ssize_t got = ::read(p.fd[0], buf, sizeof buf);
            if (got > 0) sink.append(buf, static_cast<std::size_t>(got));
            else if (got == 0 || errno != EINTR) p.close_read();
        };
        drain(idx_out, out, res.out);
        drain(idx_err, err, res.err);
        if (idx_in >= 0 && (fds[idx_in].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t w = write_no_sigpipe(in.fd[1], input.data() + written, input.size() - written);
            if (w > 0) written += static_cast<std::size_t>(w);
            if (w < 0 && errno != EAGAIN && errno != EINTR) in.close_write();
            if (written >= input.size()) in.close_write();
        }
    }
    in.close_write();

    int wstatus = 0;
    while (true) {
        pid_t w = ::waitpid(pid, &wstatus, WNOHANG);
        if (w == pid || (w < 0 && errno != EINTR)) break;
        if (!res.timed_out && std::chrono::steady_clock::now() >= deadline) {
            res.timed_out = true;
            ::kill(-pid, SIGKILL);
        }
        ::usleep(2000);
    }
    if (WIFEXITED(wstatus) && !res.timed_out) res.exit_code = WEXITSTATUS(wstatus);
    res.duration = std::chrono::steady_clock::now() - start;
    return res;
}

}  // namespace oraclegen::process
