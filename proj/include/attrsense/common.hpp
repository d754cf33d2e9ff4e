#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace attrsense {

/// Error reading or parsing an external input (file missing, malformed
/// line, bad enum literal). The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

enum class Gender { male, female };
enum class Occupation {
    politician,
    entertainer,
    cartoonist,
    entrepreneur,
    scholar,
    journalist,
    writer,
    musician,
    athlete,
    it_engineer
};
enum class AgeGroup { digital_native, digital_immigrant, unknown };
enum class Role { train, test };
enum class Task { gender, occupation, age_group };
enum class Algorithm { linear_svc, knn, adaboost, random_forest, neural_net };

inline const std::vector<std::string>& gender_names() {
    static const std::vector<std::string> names{"male", "female"};
    return names;
}

inline const std::vector<std::string>& occupation_names() {
    static const std::vector<std::string> names{
        "politician", "entertainer", "cartoonist", "entrepreneur", "scholar",
        "journalist", "writer",      "musician",   "athlete",      "it_engineer"};
    return names;
}

inline const std::vector<std::string>& age_group_names() {
    static const std::vector<std::string> names{"digital_native", "digital_immigrant",
                                                "unknown"};
    return names;
}

inline const std::vector<std::string>& role_names() {
    static const std::vector<std::string> names{"train", "test"};
    return names;
}

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"gender", "occupation", "age_group"};
    return names;
}

inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"linear_svc", "knn", "adaboost",
                                                "random_forest", "neural_net"};
    return names;
}

namespace detail {
inline int enum_index(const std::vector<std::string>& names, std::string_view text) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == text) return static_cast<int>(i);
    return -1;
}
} // namespace detail

inline std::string to_string(Gender g) { return gender_names()[static_cast<int>(g)]; }
inline std::string to_string(Occupation o) {
    return occupation_names()[static_cast<int>(o)];
}
inline std::string to_string(AgeGroup a) {
    return age_group_names()[static_cast<int>(a)];
}
inline std::string to_string(Role r) { return role_names()[static_cast<int>(r)]; }
inline std::string to_string(Task t) { return task_names()[static_cast<int>(t)]; }
inline std::string to_string(Algorithm a) {
    return algorithm_names()[static_cast<int>(a)];
}

template <class E>
E enum_from_string(std::string_view text);

template <>
inline Gender enum_from_string<Gender>(std::string_view text) {
    int i = detail::enum_index(gender_names(), text);
    if (i < 0) throw input_error("unknown gender: '" + std::string(text) + "'");
    return static_cast<Gender>(i);
}

template <>
inline Occupation enum_from_string<Occupation>(std::string_view text) {
    int i = detail::enum_index(occupation_names(), text);
    if (i < 0) throw input_error("unknown occupation: '" + std::string(text) + "'");
    return static_cast<Occupation>(i);
}

template <>
inline AgeGroup enum_from_string<AgeGroup>(std::string_view text) {
    int i = detail::enum_index(age_group_names(), text);
    if (i < 0) throw input_error("unknown age_group: '" + std::string(text) + "'");
    return static_cast<AgeGroup>(i);
}

template <>
inline Role enum_from_string<Role>(std::string_view text) {
    int i = detail::enum_index(role_names(), text);
    if (i < 0) throw input_error("unknown role: '" + std::string(text) + "'");
    return static_cast<Role>(i);
}

template <>
inline Task enum_from_string<Task>(std::string_view text) {
    int i = detail::enum_index(task_names(), text);
    if (i < 0) throw input_error("unknown task: '" + std::string(text) + "'");
    return static_cast<Task>(i);
}

template <>
inline Algorithm enum_from_string<Algorithm>(std::string_view text) {
    int i = detail::enum_index(algorithm_names(), text);
    if (i < 0) throw input_error("unknown algorithm: '" + std::string(text) + "'");
    return static_cast<Algorithm>(i);
}

/// Dense row-major matrix of doubles. Rows are exposed as spans so the
/// hot loops can run over contiguous memory.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void append_row(std::span<const double> values) {
        if (cols_ == 0) cols_ = values.size();
        if (values.size() != cols_)
            throw std::invalid_argument("append_row: arity mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

} // namespace attrsense
