#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rholab {

// A small persistent worker pool with a deterministic work decomposition.
//
// parallel_for splits [0, n) into exactly `workers` contiguous chunks, one
// per worker, regardless of load. Every per-node computation in this library
// is a pure function of shared read-only state, so the values written are
// identical for any worker count; reductions collect one partial result per
// chunk and combine them in chunk order on the calling thread. Both together
// make every pipeline output bit-identical for any `--workers` setting.
class WorkerPool {
  public:
    explicit WorkerPool(int workers);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int workers() const { return static_cast<int>(threads_.size()) + 1; }

    // fn(chunk_index, begin, end) — called once per chunk; chunk 0 runs on the
    // calling thread.
    void run_chunks(std::size_t n,
                    const std::function<void(int, std::size_t, std::size_t)>& fn);

    // Convenience: apply fn(i) to every index (no reduction).
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

    // Max-reduction helper: fn(i) produces a double per index; per-chunk maxima
    // are combined in fixed chunk order.
    double parallel_max(std::size_t n, const std::function<double(std::size_t)>& fn);

  private:
    struct Task {
        const std::function<void(int, std::size_t, std::size_t)>* fn = nullptr;
        std::size_t n = 0;
        int nchunks = 1;
    };

    void worker_loop(int id);
    static void chunk_bounds(std::size_t n, int nchunks, int c, std::size_t& b,
                             std::size_t& e);

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_start_, cv_done_;
    Task task_;
    std::size_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
};

/// Process-wide pool used by grid fills and sweep loops when no pool is
/// passed explicitly.  Defaults to the hardware concurrency; reconfigure
/// once at startup with set_global_workers before heavy work begins.
WorkerPool& global_pool();
void set_global_workers(int workers);

} // namespace rholab
