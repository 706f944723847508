#include "conecalc/interpolation.hpp"

#include <algorithm>
#include <stdexcept>

namespace conecalc {

PchipInterpolant::PchipInterpolant(Eigen::ArrayXd x, Eigen::ArrayXd y)
    : x_(std::move(x)), y_(std::move(y)) {
    const Eigen::Index n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("PchipInterpolant: need >= 2 knots");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("PchipInterpolant: x not increasing");

    Eigen::ArrayXd h = x_.tail(n - 1) - x_.head(n - 1);
    Eigen::ArrayXd delta = (y_.tail(n - 1) - y_.head(n - 1)) / h;
    d_.resize(n);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // one-sided endpoint slopes, clipped to preserve shape
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0)
            d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
            d = 3.0 * d0;
        return d;
    };
    d_[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

int PchipInterpolant::segment(double x) const {
    const auto* begin = x_.data();
    const auto* end = begin + x_.size();
    auto it = std::upper_bound(begin, end, x);
    int i = static_cast<int>(it - begin) - 1;
    return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
}

double PchipInterpolant::operator()(double x) const {
    x = std::clamp(x, x_[0], x_[x_.size() - 1]);
    const int i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
    x = std::clamp(x, x_[0], x_[x_.size() - 1]);
    const int i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

}  // namespace conecalc
