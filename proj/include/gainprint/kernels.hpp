#pragma once

#include <cstddef>
#include <span>

// Dense tensor kernels for the classifier. Every kernel exists twice with the
// same signature: `serial::` is the plain reference loop nest, `parallel::`
// distributes independent work with OpenMP. The parallel variants keep the
// serial summation order inside each output element, so both produce
// bit-identical results for any thread count.
//
// Layouts (row-major, batch outermost):
//   conv input  [batch][in_channels][in_len]
//   conv weight [out_channels][in_channels][kernel]
//   conv output [batch][out_channels][out_len], out_len = in_len - kernel + 1
//   dense input [batch][in], weight [out][in], output [batch][out]
// Backward kernels overwrite their gradient outputs. An empty `dx` skips the
// input gradient (used for the first layer).

namespace gainprint::kernels {

struct ConvShape {
    std::size_t batch = 0;
    std::size_t in_channels = 0;
    std::size_t in_len = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 0;

    std::size_t out_len() const noexcept { return in_len - kernel + 1; }
    std::size_t input_size() const noexcept { return batch * in_channels * in_len; }
    std::size_t weight_size() const noexcept { return out_channels * in_channels * kernel; }
    std::size_t output_size() const noexcept { return batch * out_channels * out_len(); }
};

struct DenseShape {
    std::size_t batch = 0;
    std::size_t in = 0;
    std::size_t out = 0;
};

enum class Backend { Serial, Parallel };

#define GAINPRINT_KERNEL_DECLS                                                                                 \
    void conv1d_forward(const ConvShape& s, std::span<const double> x, std::span<const double> w,             \
                        std::span<const double> b, std::span<double> y);                                      \
    void conv1d_backward(const ConvShape& s, std::span<const double> x, std::span<const double> w,            \
                         std::span<const double> dy, std::span<double> dx, std::span<double> dw,              \
                         std::span<double> db);                                                               \
    void dense_forward(const DenseShape& s, std::span<const double> x, std::span<const double> w,             \
                       std::span<const double> b, std::span<double> y);                                       \
    void dense_backward(const DenseShape& s, std::span<const double> x, std::span<const double> w,            \
                        std::span<const double> dy, std::span<double> dx, std::span<double> dw,               \
                        std::span<double> db);                                                                \
    void relu_forward(std::span<double> x);                                                                   \
    void relu_backward(std::span<const double> activated, std::span<double> grad);                            \
    void softmax_rows(std::span<const double> logits, std::span<double> probs, std::size_t rows,              \
                      std::size_t cols);

namespace serial {
GAINPRINT_KERNEL_DECLS
}
namespace parallel {
GAINPRINT_KERNEL_DECLS
}

#undef GAINPRINT_KERNEL_DECLS

/// Runtime dispatch used by the network code.
struct Kernels {
    Backend backend = Backend::Parallel;

    void conv1d_forward(const ConvShape& s, std::span<const double> x, std::span<const double> w,
                        std::span<const double> b, std::span<double> y) const {
        backend == Backend::Serial ? serial::conv1d_forward(s, x, w, b, y) : parallel::conv1d_forward(s, x, w, b, y);
    }
    void conv1d_backward(const ConvShape& s, std::span<const double> x, std::span<const double> w,
                         std::span<const double> dy, std::span<double> dx, std::span<double> dw,
                         std::span<double> db) const {
        backend == Backend::Serial ? serial::conv1d_backward(s, x, w, dy, dx, dw, db)
                                   : parallel::conv1d_backward(s, x, w, dy, dx, dw, db);
    }
    void dense_forward(const DenseShape& s, std::span<const double> x, std::span<const double> w,
                       std::span<const double> b, std::span<double> y) const {
        backend == Backend::Serial ? serial::dense_forward(s, x, w, b, y) : parallel::dense_forward(s, x, w, b, y);
    }
    void dense_backward(const DenseShape& s, std::span<const double> x, std::span<const double> w,
                        std::span<const double> dy, std::span<double> dx, std::span<double> dw,
                        std::span<double> db) const {
        backend == Backend::Serial ? serial::dense_backward(s, x, w, dy, dx, dw, db)
                                   : parallel::dense_backward(s, x, w, dy, dx, dw, db);
    }
    void relu_forward(std::span<double> x) const {
        backend == Backend::Serial ? serial::relu_forward(x) : parallel::relu_forward(x);
    }
    void relu_backward(std::span<const double> activated, std::span<double> grad) const {
        backend == Backend::Serial ? serial::relu_backward(activated, grad) : parallel::relu_backward(activated, grad);
    }
    void softmax_rows(std::span<const double> logits, std::span<double> probs, std::size_t rows,
                      std::size_t cols) const {
        backend == Backend::Serial ? serial::softmax_rows(logits, probs, rows, cols)
                                   : parallel::softmax_rows(logits, probs, rows, cols);
    }
};

}  // namespace gainprint::kernels
