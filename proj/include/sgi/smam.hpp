#pragma once

#include "sgi/errors.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgi {

/// Age below which nobody is assumed to have married.
inline constexpr double SMAM_START_AGE = 15.0;

/// Default age beyond which first marriage is assumed not to occur.
inline constexpr double DEFAULT_SMAM_UPPER_LIMIT = 50.0;

enum class Sex { male, female };

inline std::string_view to_string(Sex sex) noexcept {
    return sex == Sex::male ? "male" : "female";
}

inline std::optional<Sex> parse_sex(std::string_view text) noexcept {
    if (text == "male" || text == "m" || text == "M") {
        return Sex::male;
    }
    if (text == "female" || text == "f" || text == "F") {
        return Sex::female;
    }
    return std::nullopt;
}

/// Half-open age interval [lower, upper) in years.
struct AgeGroup {
    double lower;
    double upper;

    double width() const noexcept { return upper - lower; }
    std::string label() const;

    friend bool operator==(const AgeGroup &, const AgeGroup &) = default;
};

inline std::string AgeGroup::label() const {
    auto fmt = [](double v) {
        const auto rounded = std::llround(v);
        return static_cast<double>(rounded) == v ? std::to_string(rounded) : std::to_string(v);
    };
    return "[" + fmt(lower) + "," + fmt(upper) + ")";
}

struct MaritalRow {
    AgeGroup group;
    std::int64_t total;
    std::int64_t never_married;
};

struct AgeProportion {
    AgeGroup group;
    double proportion;
};

/// Counts by age group and never-married status for one sex.
///
/// Rows must be ascending and contiguous, with group boundaries at 15 and at the upper limit,
/// and a group starting at the upper limit (needed to estimate the never-marrying share).
class MaritalStatusTable {
  public:
    MaritalStatusTable(Sex sex, std::vector<MaritalRow> rows,
                       double upper_limit = DEFAULT_SMAM_UPPER_LIMIT)
        : sex_{sex}, rows_{std::move(rows)}, upper_limit_{upper_limit} {
        validate();
    }

    Sex sex() const noexcept { return sex_; }
    const std::vector<MaritalRow> &rows() const noexcept { return rows_; }
    double upper_limit() const noexcept { return upper_limit_; }

    /// Same counts, different upper limit; revalidated.
    MaritalStatusTable with_upper_limit(double upper_limit) const {
        return MaritalStatusTable{sex_, rows_, upper_limit};
    }

  private:
    void validate() const {
        if (!std::isfinite(upper_limit_) || upper_limit_ <= SMAM_START_AGE) {
            throw schema_error{"upper age limit must exceed " + std::to_string(SMAM_START_AGE)};
        }
        if (rows_.empty()) {
            throw schema_error{"marital status table has no rows"};
        }
        bool starts_at_15 = false;
        bool ends_at_limit = false;
        bool has_limit_group = false;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto &row = rows_[i];
            if (!(row.group.upper > row.group.lower)) {
                throw schema_error{"age group " + row.group.label() + " is empty"};
            }
            if (i > 0 && row.group.lower != rows_[i - 1].group.upper) {
                throw schema_error{"age groups " + rows_[i - 1].group.label() + " and " +
                                   row.group.label() + " are not contiguous and ascending"};
            }
            if (row.total < 0 || row.never_married < 0) {
                throw invalid_input_error{"age group " + row.group.label(),
                                          "counts must be non-negative"};
            }
            if (row.never_married > row.total) {
                throw invalid_input_error{"age group " + row.group.label(),
                                          "never_married exceeds total"};
            }
            starts_at_15 = starts_at_15 || row.group.lower == SMAM_START_AGE;
            ends_at_limit = ends_at_limit || row.group.upper == upper_limit_;
            has_limit_group = has_limit_group || row.group.lower == upper_limit_;
        }
        if (!starts_at_15) {
            throw schema_error{"no age group starts at 15"};
        }
        if (!ends_at_limit || !has_limit_group) {
            throw schema_error{"age groups must have a boundary at the upper limit " +
                               std::to_string(upper_limit_) +
                               " with a group on each side of it"};
        }
    }

    Sex sex_;
    std::vector<MaritalRow> rows_;
    double upper_limit_;
};

inline double proportion_single(const MaritalRow &row) {
    if (row.total == 0) {
        throw degenerate_cell_error{"age group " + row.group.label() + " has zero total"};
    }
    return static_cast<double>(row.never_married) / static_cast<double>(row.total);
}

/// Never-married share for every row of the table.
inline std::vector<AgeProportion> proportions_single(const MaritalStatusTable &table) {
    std::vector<AgeProportion> out;
    out.reserve(table.rows().size());
    for (const auto &row : table.rows()) {
        out.push_back({row.group, proportion_single(row)});
    }
    return out;
}

/// Singulate mean age at marriage by Hajnal's discrete procedure.
///
/// SS = 15 + sum of width * proportion single over groups in [15, limit); U is the mean of the
/// proportions single in the groups either side of the limit; SMAM = (SS - limit*U) / (1 - U).
inline double compute_smam(const MaritalStatusTable &table) {
    const double limit = table.upper_limit();
    double person_years_single = SMAM_START_AGE;
    std::optional<double> below_limit;
    std::optional<double> above_limit;

    for (const auto &row : table.rows()) {
        if (row.group.lower >= SMAM_START_AGE && row.group.upper <= limit) {
            const double p = proportion_single(row);
            person_years_single += row.group.width() * p;
            if (row.group.upper == limit) {
                below_limit = p;
            }
        } else if (row.group.lower == limit) {
            above_limit = proportion_single(row);
        }
    }
    if (!below_limit || !above_limit) {
        throw schema_error{"table lacks the age groups adjoining the upper limit"};
    }

    const double never_marrying = 0.5 * (*below_limit + *above_limit);
    if (never_marrying >= 1.0) {
        throw undefined_smam_error{std::string{"nobody in the "} + std::string{to_string(table.sex())} +
                                   " table marries before the upper limit"};
    }
    return (person_years_single - limit * never_marrying) / (1.0 - never_marrying);
}

} // namespace sgi
