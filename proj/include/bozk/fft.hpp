#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace bozk {

using cplx = std::complex<double>;

/// @brief Process-wide cache of FFTW plans keyed by shape and direction.
///
/// Plans are created with FFTW_ESTIMATE so that the chosen algorithm, and hence
/// every output bit, does not depend on timing measurements. Plans are executed
/// with the new-array interface, which is thread safe; only creation is guarded.
class FftPlans {
public:
    static FftPlans& instance()
    {
        static FftPlans plans;
        return plans;
    }

    // Complex DFT of rank 1 (n1 == 0) or rank 2, unnormalized.
    void execute(int n0, int n1, int sign, const cplx* in, cplx* out)
    {
        fftw_plan plan = get(n0, n1, sign);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    /// Threads used inside each transform. Changing it drops cached plans.
    void set_threads(int nthreads)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (nthreads < 1)
            throw std::invalid_argument("thread count must be positive");
        if (nthreads == threads_)
            return;
        if (!threads_ready_) {
            fftw_init_threads();
            threads_ready_ = true;
        }
        clear_locked();
        fftw_plan_with_nthreads(nthreads);
        threads_ = nthreads;
    }

    int threads() const { return threads_; }

    ~FftPlans() { clear_locked(); }

private:
    FftPlans() = default;

    fftw_plan get(int n0, int n1, int sign)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(n0, n1, sign);
        auto it = plans_.find(key);
        if (it != plans_.end())
            return it->second;

        std::size_t total = static_cast<std::size_t>(n0) * (n1 > 0 ? n1 : 1);
        std::vector<cplx> a(total), b(total);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = n1 > 0 ? fftw_plan_dft_2d(n0, n1, pa, pb, sign, flags)
                                : fftw_plan_dft_1d(n0, pa, pb, sign, flags);
        if (!plan)
            throw std::runtime_error("FFTW plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    void clear_locked()
    {
        for (auto& kv : plans_)
            fftw_destroy_plan(kv.second);
        plans_.clear();
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
    int threads_ = 1;
    bool threads_ready_ = false;
};

inline void fft_forward_2d(int n0, int n1, const cplx* in, cplx* out)
{
    FftPlans::instance().execute(n0, n1, FFTW_FORWARD, in, out);
}

inline void fft_backward_2d(int n0, int n1, const cplx* in, cplx* out)
{
    FftPlans::instance().execute(n0, n1, FFTW_BACKWARD, in, out);
}

inline void fft_forward_1d(int n, const cplx* in, cplx* out)
{
    FftPlans::instance().execute(n, 0, FFTW_FORWARD, in, out);
}

inline void fft_backward_1d(int n, const cplx* in, cplx* out)
{
    FftPlans::instance().execute(n, 0, FFTW_BACKWARD, in, out);
}

inline void set_fft_threads(int nthreads) { FftPlans::instance().set_threads(nthreads); }

} // namespace bozk
