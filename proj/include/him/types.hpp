#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "him/error.hpp"

namespace him {

// Which location/scale estimates back the standardization: sample mean and
// (n-1)-divisor standard deviation, or median and 1.4826*MAD.
enum class Estimator { moment, robust };

std::string to_string(Estimator estimator);

// An n x p predictor matrix (column-major) plus the length-n response.
// Construction validates the invariants every downstream routine relies on:
// all entries finite, n >= 3, and no column (nor the response) with zero
// sample variance. Degenerate columns are rejected here rather than dropped,
// so column indices in reports always refer to the input as given.
class DataMatrix {
public:
    DataMatrix(std::size_t n_rows, std::size_t n_cols,
               std::vector<double> x_col_major, std::vector<double> y,
               std::vector<std::string> column_names = {});

    // Convenience for tests and small examples: x given row by row.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                std::vector<double> y,
                                std::vector<std::string> column_names = {});

    std::size_t n_rows() const { return n_; }
    std::size_t n_cols() const { return p_; }

    double x(std::size_t i, std::size_t j) const { return x_[j * n_ + i]; }

    std::span<const double> column(std::size_t j) const {
        return {x_.data() + j * n_, n_};
    }

    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& x_data() const { return x_; }
    const std::vector<std::string>& column_names() const { return names_; }

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> x_;  // column-major, p contiguous columns of length n
    std::vector<double> y_;
    std::vector<std::string> names_;
};

}  // namespace him
