#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>
#include <utility>
#include <vector>

#include "kurepa/errors.hpp"

namespace kurepa::detail {

// Runs `work` over the jobs produced by `next_job` on `workers` threads and hands the results
// to `commit` on the calling thread in production order. `commit` returning false stops the
// pool: in-flight jobs are cancelled through the stop token and their results dropped.
// At most 2 * workers jobs are outstanding. Exceptions from any callback are rethrown here
// after all threads have joined.
template <class Job, class Result>
void run_ordered(unsigned workers, const std::function<std::optional<Job>()>& next_job,
                 const std::function<Result(const Job&, std::stop_token)>& work,
                 const std::function<bool(Job&&, Result&&)>& commit) {
    if (workers == 0) workers = 1;
    std::mutex mu;
    std::condition_variable cv;
    std::size_t issued = 0, committed = 0;
    const std::size_t max_inflight = 2 * static_cast<std::size_t>(workers);
    bool exhausted = false, stopping = false;
    std::map<std::size_t, std::pair<Job, Result>> done;
    std::exception_ptr error;
    std::stop_source stop;

    auto fail = [&](std::exception_ptr e) {
        if (!error) error = e;
        stopping = true;
        stop.request_stop();
        cv.notify_all();
    };

    auto worker = [&] {
        for (;;) {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return stopping || exhausted || issued - committed < max_inflight; });
            if (stopping || exhausted) return;
            std::optional<Job> job;
            try {
                job = next_job();
            } catch (...) {
                fail(std::current_exception());
                return;
            }
            if (!job) {
                exhausted = true;
                cv.notify_all();
                return;
            }
            const std::size_t ordinal = issued++;
            lock.unlock();
            try {
                Result r = work(*job, stop.get_token());
                lock.lock();
                done.emplace(ordinal, std::pair<Job, Result>(std::move(*job), std::move(r)));
                cv.notify_all();
            } catch (const Cancelled&) {
                return;
            } catch (...) {
                lock.lock();
                fail(std::current_exception());
                return;
            }
        }
    };

    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);

    {
        std::unique_lock lock(mu);
        for (;;) {
            cv.wait(lock, [&] {
                return error || done.contains(committed) || (exhausted && committed == issued);
            });
            if (error) break;
            if (!done.contains(committed)) break;  // exhausted and fully committed
            auto node = done.extract(committed);
            lock.unlock();
            bool keep_going = true;
            try {
                keep_going = commit(std::move(node.mapped().first), std::move(node.mapped().second));
            } catch (...) {
                lock.lock();
                fail(std::current_exception());
                break;
            }
            lock.lock();
            ++committed;
            cv.notify_all();
            if (!keep_going) {
                stopping = true;
                stop.request_stop();
                cv.notify_all();
                break;
            }
        }
    }
    threads.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace kurepa::detail
