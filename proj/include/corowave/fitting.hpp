#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace corowave {

struct LineFit {
    double a = 0;  // intercept
    double b = 0;  // slope
};

inline LineFit least_squares_line(const std::vector<double>& t,
                                  const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2)
        throw std::invalid_argument("least_squares_line: need >= 2 samples");
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double det = n * stt - st * st;
    LineFit f;
    f.b = (n * sty - st * sy) / det;
    f.a = (sy - f.b * st) / n;
    return f;
}

struct BlowupFit {
    double T_hat = 0;
    bool monotone = false;             // central value increasing over the window
    std::vector<double> window_T_hat;  // per-subwindow estimates (drift diagnostic)
    double drift = 0;                  // |last - first| of window_T_hat
};

// Least squares on 1/u(t, r0) against t over the last `window` samples,
// excluding the final `skip` (near-threshold values are least accurate).
// T_hat is the root of the fitted line. Throws std::runtime_error when the
// window is not monotonically increasing.
inline BlowupFit fit_blowup_time(const std::vector<double>& times,
                                 const std::vector<double>& central,
                                 int window = 50, int skip = 5) {
    const int m = static_cast<int>(times.size());
    if (m < window + skip)
        throw std::runtime_error("fit_blowup_time: trajectory shorter than fit window");
    const int hi = m - skip;
    const int lo = hi - window;
    BlowupFit out;
    out.monotone = true;
    std::vector<double> ts, ys;
    ts.reserve(window);
    ys.reserve(window);
    for (int i = lo; i < hi; ++i) {
        if (i > lo && central[i] <= central[i - 1]) out.monotone = false;
        ts.push_back(times[i]);
        ys.push_back(1.0 / central[i]);
    }
    if (!out.monotone)
        throw std::runtime_error("fit_blowup_time: non-monotone central value in window");
    const LineFit f = least_squares_line(ts, ys);
    out.T_hat = -f.a / f.b;
    // estimates over the four quarters of the window, oldest first
    const int q = window / 4;
    for (int w = 0; w + 1 < 4 + 1 && q >= 2; ++w) {
        std::vector<double> tq(ts.begin() + w * q, ts.begin() + (w + 1) * q);
        std::vector<double> yq(ys.begin() + w * q, ys.begin() + (w + 1) * q);
        const LineFit fq = least_squares_line(tq, yq);
        out.window_T_hat.push_back(-fq.a / fq.b);
    }
    if (out.window_T_hat.size() >= 2)
        out.drift = std::abs(out.window_T_hat.back() - out.window_T_hat.front());
    return out;
}

}  // namespace corowave
