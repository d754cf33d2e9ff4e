#pragma once

#include <cmath>
#include <vector>

#include "attrsense/common.hpp"

namespace attrsense {

/// Per-dimension zero-mean unit-variance scaling, statistics fit on
/// training data only. Constant dimensions keep scale 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& rows) {
        Standardizer s;
        const std::size_t n = rows.rows(), d = rows.cols();
        s.mean.assign(d, 0.0);
        s.scale.assign(d, 1.0);
        if (n == 0) return s;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = rows.row(i);
            for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
        }
        for (double& m : s.mean) m /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = rows.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                double c = row[j] - s.mean[j];
                var[j] += c * c;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            double sd = std::sqrt(var[j] / static_cast<double>(n));
            s.scale[j] = sd > 1e-12 ? sd : 1.0;
        }
        return s;
    }

    void apply(std::span<double> row) const {
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = (row[j] - mean[j]) / scale[j];
    }

    Matrix transform(const Matrix& rows) const {
        Matrix out = rows;
        for (std::size_t i = 0; i < out.rows(); ++i) apply(out.row(i));
        return out;
    }
};

} // namespace attrsense
