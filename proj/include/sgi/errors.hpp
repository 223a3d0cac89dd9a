#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgi {

/// Root of every error raised by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A value supplied at a boundary violates a type invariant.
class invalid_input_error : public error {
  public:
    invalid_input_error(std::string field, const std::string &message)
        : error{field + ": " + message}, field_{std::move(field)} {}

    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Argument outside the mathematical domain of a formula (e.g. log of a non-positive rate).
class domain_error : public error {
  public:
    using error::error;
};

/// Table layout does not match what an estimator needs.
class schema_error : public error {
  public:
    using error::error;
};

/// A cell whose denominator is zero.
class degenerate_cell_error : public error {
  public:
    using error::error;
};

/// SMAM cannot be computed because nobody in the table ever marries.
class undefined_smam_error : public error {
  public:
    using error::error;
};

/// Simulation parameters that cannot produce a meaningful run.
class configuration_error : public error {
  public:
    using error::error;
};

/// A lookup outside the span of a series.
class range_error : public error {
  public:
    using error::error;
};

/// Neither direct values nor the data needed to derive them are available.
class missing_data_error : public error {
  public:
    using error::error;
};

/// Too few observations for an estimator.
class insufficient_data_error : public error {
  public:
    using error::error;
};

/// Input file problem, located by file, line and column.
class validation_error : public error {
  public:
    validation_error(std::string file, std::size_t line, std::string column,
                     const std::string &message)
        : error{locate(file, line, column) + message}, file_{std::move(file)}, line_{line},
          column_{std::move(column)} {}

    const std::string &file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string &column() const noexcept { return column_; }

  private:
    static std::string locate(const std::string &file, std::size_t line,
                              const std::string &column) {
        std::string where = file;
        if (line > 0) {
            where += ":" + std::to_string(line);
        }
        if (!column.empty()) {
            where += " [" + column + "]";
        }
        return where + ": ";
    }

    std::string file_;
    std::size_t line_;
    std::string column_;
};

} // namespace sgi
