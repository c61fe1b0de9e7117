#ifndef SSAKIT_COMMON_HPP
#define SSAKIT_COMMON_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ssakit {

/// Thrown when a caller-supplied parameter is outside its documented range
/// (maps to CLI exit code 2).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when the data itself is unusable, e.g. non-finite samples or a
/// degenerate input where a value is required (maps to CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A multichannel series: one real-valued series per channel, lengths may differ.
struct MultiSeries {
    std::vector<Vector> channels;

    MultiSeries() = default;
    explicit MultiSeries(std::vector<Vector> ch) : channels(std::move(ch)) {}

    Index channel_count() const { return static_cast<Index>(channels.size()); }
    Index length(Index p) const { return channels[static_cast<std::size_t>(p)].size(); }
    Index min_length() const {
        Index m = channels.empty() ? 0 : channels.front().size();
        for (const auto& c : channels) m = std::min(m, c.size());
        return m;
    }
};

namespace detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ParameterError(msg);
}

inline void require_data(bool cond, const std::string& msg) {
    if (!cond) throw DataError(msg);
}

}  // namespace detail

}  // namespace ssakit

#endif  // SSAKIT_COMMON_HPP
