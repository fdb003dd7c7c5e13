#pragma once

#include <cstdint>
#include <vector>

#include "det4d/core/dual.hpp"
#include "det4d/core/errors.hpp"

namespace det4d {

/// Dense row-major matrix, sized for the desk-scale decoder.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, S fill = S{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw DimMismatch("matrix: negative size");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const S& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  const std::vector<S>& data() const { return data_; }
  std::vector<S>& data() { return data_; }

  template <class U>
  static Matrix cast_from(const Matrix<U>& o) {
    Matrix m(o.rows(), o.cols());
    for (std::size_t i = 0; i < o.data().size(); ++i) m.data()[i] = S(o.data()[i]);
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

/// rows(a) x cols(b) product; b is accessed column-wise.
template <class S>
Matrix<S> matmul(const Matrix<S>& a, const Matrix<double>& b) {
  if (a.cols() != b.rows()) throw DimMismatch("matmul: inner dimensions differ");
  Matrix<S> out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const S& aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

/// Per-frame token block: `frames` x `per_frame` positions of `dim` features
/// with a validity flag per position. Invalid (padded) positions carry zeros.
template <class S>
struct TokenGrid {
  int frames = 0;
  int per_frame = 0;
  int dim = 0;
  Matrix<S> values;                 // (frames * per_frame) x dim
  std::vector<std::uint8_t> valid;  // one flag per position

  TokenGrid() = default;
  TokenGrid(int frames_, int per_frame_, int dim_)
      : frames(frames_),
        per_frame(per_frame_),
        dim(dim_),
        values(frames_ * per_frame_, dim_),
        valid(static_cast<std::size_t>(frames_) * per_frame_, 1) {}

  int positions() const { return frames * per_frame; }
  int frame_of(int position) const { return position / per_frame; }
  bool is_valid(int position) const { return valid[static_cast<std::size_t>(position)] != 0; }

  /// Writes zeros into every invalid row.
  void zero_invalid() {
    for (int p = 0; p < positions(); ++p)
      if (!is_valid(p))
        for (int c = 0; c < dim; ++c) values(p, c) = S(0);
  }

  template <class U>
  static TokenGrid cast_from(const TokenGrid<U>& o) {
    TokenGrid g;
    g.frames = o.frames;
    g.per_frame = o.per_frame;
    g.dim = o.dim;
    g.values = Matrix<S>::template cast_from<U>(o.values);
    g.valid = o.valid;
    return g;
  }
};

/// Prompt/box tokens entering the decoder.
template <class S>
using TokenTensor = TokenGrid<S>;

/// Per-frame feature embeddings (image or geometry side).
template <class S>
using EmbeddingTensor = TokenGrid<S>;

}  // namespace det4d
