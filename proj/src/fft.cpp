#include "uteich/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace uteich {

namespace {

std::mutex plan_mutex;

fftw_plan get_plan(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    CVec in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

CVec run(const CVec& x, int sign) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return {};
    CVec in = x, out(n);
    fftw_execute_dft(get_plan(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

} // namespace

CVec fft(const CVec& x) { return run(x, FFTW_FORWARD); }
CVec ifft_raw(const CVec& X) { return run(X, FFTW_BACKWARD); }

CVec samples_to_coeffs(const CVec& samples, int K) {
    const int n = static_cast<int>(samples.size());
    if (2 * K + 1 > n) throw std::invalid_argument("samples_to_coeffs: too few samples");
    CVec X = fft(samples);
    CVec c(2 * K + 1);
    for (int k = -K; k <= K; ++k) c[k + K] = X[((k % n) + n) % n] / double(n);
    return c;
}

CVec coeffs_to_samples(const CVec& coeffs, int n) {
    const int K = (static_cast<int>(coeffs.size()) - 1) / 2;
    if (2 * K + 1 > n) throw std::invalid_argument("coeffs_to_samples: too few samples");
    CVec X(n, cplx(0));
    for (int k = -K; k <= K; ++k) X[((k % n) + n) % n] += coeffs[k + K];
    return ifft_raw(X);
}

} // namespace uteich
