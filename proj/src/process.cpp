#include "promo/process.hpp"

#include "promo/errors.hpp"
#include "promo/log.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace promo::proc {

namespace {

std::mutex hook_mutex;
TraceHook trace_hook;

std::string join_argv(const std::vector<std::string>& argv) {
    std::string joined;
    for (const auto& arg : argv) {
        if (!joined.empty())
            joined += ' ';
        joined += arg;
    }
    return joined;
}

void drain(int fd, std::string& into) {
    char buffer[4096];
    ssize_t n;
    while ((n = read(fd, buffer, sizeof(buffer))) > 0)
        into.append(buffer, static_cast<std::size_t>(n));
}

} // namespace

TraceHook set_trace_hook(TraceHook hook) {
    std::lock_guard lock(hook_mutex);
    TraceHook previous = std::move(trace_hook);
    trace_hook = std::move(hook);
    return previous;
}

RunResult run(const std::vector<std::string>& argv, const RunOptions& options) {
    if (argv.empty())
        throw RepositoryAccessFailed("cannot run an empty command");

    {
        std::lock_guard lock(hook_mutex);
        if (trace_hook)
            trace_hook(argv);
    }
    log::debug("exec: " + join_argv(argv));

    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw RepositoryAccessFailed("pipe() failed: " + std::string(std::strerror(errno)));

    std::vector<char*> child_argv;
    child_argv.reserve(argv.size() + 1);
    for (const auto& arg : argv)
        child_argv.push_back(const_cast<char*>(arg.c_str()));
    child_argv.push_back(nullptr);

    // Build the child environment up front; no allocation between fork and exec.
    std::vector<std::string> env_storage;
    std::vector<char*> child_env;
    for (char** e = environ; *e != nullptr; ++e)
        child_env.push_back(*e);
    for (const auto& [key, value] : options.extra_env) {
        env_storage.push_back(key + "=" + value);
        child_env.push_back(env_storage.back().data());
    }
    child_env.push_back(nullptr);

    const std::string cwd = options.cwd.string();

    pid_t pid = fork();
    if (pid < 0) {
        close(out_pipe[0]); close(out_pipe[1]);
        close(err_pipe[0]); close(err_pipe[1]);
        throw RepositoryAccessFailed("fork() failed: " + std::string(std::strerror(errno)));
    }

    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]); close(out_pipe[1]);
        close(err_pipe[0]); close(err_pipe[1]);
        if (!cwd.empty() && chdir(cwd.c_str()) != 0)
            _exit(127);
        execvpe(child_argv[0], child_argv.data(), child_env.data());
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    RunResult result;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::seconds(options.timeout_seconds);
    bool out_open = true;
    bool err_open = true;

    while (out_open || err_open) {
        if (std::chrono::steady_clock::now() > deadline) {
            kill(pid, SIGKILL);
            int status = 0;
            waitpid(pid, &status, 0);
            close(out_pipe[0]);
            close(err_pipe[0]);
            throw RepositoryAccessFailed("command timed out: " + join_argv(argv));
        }

        pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open)
            fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open)
            fds[nfds++] = {err_pipe[0], POLLIN, 0};

        int ready = poll(fds, nfds, 200);
        if (ready < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        for (nfds_t i = 0; i < nfds; ++i) {
            if (fds[i].revents == 0)
                continue;
            const bool is_out = fds[i].fd == out_pipe[0];
            char buffer[4096];
            ssize_t n;
            while ((n = read(fds[i].fd, buffer, sizeof(buffer))) > 0)
                (is_out ? result.out : result.err).append(buffer, static_cast<std::size_t>(n));
            if (n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK)) {
                if (is_out)
                    out_open = false;
                else
                    err_open = false;
            }
        }
    }

    drain(out_pipe[0], result.out);
    drain(err_pipe[0], result.err);
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    if (waitpid(pid, &status, 0) < 0)
        throw RepositoryAccessFailed("waitpid() failed: " + std::string(std::strerror(errno)));
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = -WTERMSIG(status);

    return result;
}

} // namespace promo::proc
