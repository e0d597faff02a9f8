#include "cdfts/matrix.hpp"

#include "cdfts/error.hpp"

namespace cdfts {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ValidationError("matrix data size does not match its shape");
    }
}

} // namespace cdfts
