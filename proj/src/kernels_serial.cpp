// Reference loop nests. Kept deliberately plain; the parallel versions are
// tested against these.
#include <algorithm>
#include <cmath>

#include "gainprint/kernels.hpp"

namespace gainprint::kernels::serial {

void conv1d_forward(const ConvShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::span<double> y) {
    const std::size_t lout = s.out_len();
    for (std::size_t n = 0; n < s.batch; ++n) {
        for (std::size_t co = 0; co < s.out_channels; ++co) {
            for (std::size_t t = 0; t < lout; ++t) {
                double acc = b[co];
                for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
                    const double* xr = &x[(n * s.in_channels + ci) * s.in_len + t];
                    const double* wr = &w[(co * s.in_channels + ci) * s.kernel];
                    for (std::size_t k = 0; k < s.kernel; ++k) acc += wr[k] * xr[k];
                }
                y[(n * s.out_channels + co) * lout + t] = acc;
            }
        }
    }
}

void conv1d_backward(const ConvShape& s, std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::span<double> dx, std::span<double> dw,
                     std::span<double> db) {
    const std::size_t lout = s.out_len();
    for (std::size_t co = 0; co < s.out_channels; ++co) {
        double acc = 0.0;
        for (std::size_t n = 0; n < s.batch; ++n)
            for (std::size_t t = 0; t < lout; ++t) acc += dy[(n * s.out_channels + co) * lout + t];
        db[co] = acc;
        for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
            for (std::size_t k = 0; k < s.kernel; ++k) {
                double g = 0.0;
                for (std::size_t n = 0; n < s.batch; ++n) {
                    const double* dyr = &dy[(n * s.out_channels + co) * lout];
                    const double* xr = &x[(n * s.in_channels + ci) * s.in_len + k];
                    for (std::size_t t = 0; t < lout; ++t) g += dyr[t] * xr[t];
                }
                dw[(co * s.in_channels + ci) * s.kernel + k] = g;
            }
        }
    }
    if (dx.empty()) return;
    for (std::size_t n = 0; n < s.batch; ++n) {
        for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
            for (std::size_t p = 0; p < s.in_len; ++p) {
                double acc = 0.0;
                for (std::size_t co = 0; co < s.out_channels; ++co) {
                    const double* dyr = &dy[(n * s.out_channels + co) * lout];
                    const double* wr = &w[(co * s.in_channels + ci) * s.kernel];
                    for (std::size_t k = 0; k < s.kernel; ++k) {
                        if (p >= k && p - k < lout) acc += dyr[p - k] * wr[k];
                    }
                }
                dx[(n * s.in_channels + ci) * s.in_len + p] = acc;
            }
        }
    }
}

void dense_forward(const DenseShape& s, std::span<const double> x, std::span<const double> w,
                   std::span<const double> b, std::span<double> y) {
    for (std::size_t n = 0; n < s.batch; ++n) {
        const double* xr = &x[n * s.in];
        for (std::size_t o = 0; o < s.out; ++o) {
            const double* wr = &w[o * s.in];
            double acc = b[o];
            for (std::size_t i = 0; i < s.in; ++i) acc += wr[i] * xr[i];
            y[n * s.out + o] = acc;
        }
    }
}

void dense_backward(const DenseShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<const double> dy, std::span<double> dx, std::span<double> dw,
                    std::span<double> db) {
    for (std::size_t o = 0; o < s.out; ++o) {
        double* dwr = &dw[o * s.in];
        std::fill(dwr, dwr + s.in, 0.0);
        double acc = 0.0;
        for (std::size_t n = 0; n < s.batch; ++n) {
            const double g = dy[n * s.out + o];
            acc += g;
            const double* xr = &x[n * s.in];
            for (std::size_t i = 0; i < s.in; ++i) dwr[i] += g * xr[i];
        }
        db[o] = acc;
    }
    if (dx.empty()) return;
    for (std::size_t n = 0; n < s.batch; ++n) {
        double* dxr = &dx[n * s.in];
        std::fill(dxr, dxr + s.in, 0.0);
        for (std::size_t o = 0; o < s.out; ++o) {
            const double g = dy[n * s.out + o];
            const double* wr = &w[o * s.in];
            for (std::size_t i = 0; i < s.in; ++i) dxr[i] += g * wr[i];
        }
    }
}

void relu_forward(std::span<double> x) {
    for (double& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> grad) {
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!(activated[i] > 0.0)) grad[i] = 0.0;
}

void softmax_rows(std::span<const double> logits, std::span<double> probs, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* in = &logits[r * cols];
        double* out = &probs[r * cols];
        const double peak = *std::max_element(in, in + cols);
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            out[c] = std::exp(in[c] - peak);
            sum += out[c];
        }
        for (std::size_t c = 0; c < cols; ++c) out[c] /= sum;
    }
}

}  // namespace gainprint::kernels::serial
