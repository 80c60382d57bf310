#pragma once

#include <stdexcept>
#include <string>

namespace mixedpde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// A ProblemSpec failed validation; the message lists the violated constraints.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DiscretizationTooCoarse : public Error {
public:
    DiscretizationTooCoarse(int mode, const std::string& detail)
        : Error("discretization too coarse at mode " + std::to_string(mode) + ": " + detail),
          mode_(mode) {}
    int mode() const noexcept { return mode_; }

private:
    int mode_;
};

/// The modal determinant vanishes (to tolerance) for mode k.
class SingularMode : public Error {
public:
    explicit SingularMode(int k, double det_scaled)
        : Error("singular mode k=" + std::to_string(k)), k_(k), det_(det_scaled) {}
    int mode() const noexcept { return k_; }
    double det_scaled() const noexcept { return det_; }

private:
    int k_;
    double det_;
};

/// Singular mode whose boundary data are not orthogonal to the eigenfunction.
class SingularModeWithData : public Error {
public:
    SingularModeWithData(int k, double data_norm)
        : Error("singular mode k=" + std::to_string(k) +
                " carries boundary data (|coef| = " + std::to_string(data_norm) + ")"),
          k_(k), data_(data_norm) {}
    int mode() const noexcept { return k_; }
    double data_norm() const noexcept { return data_; }

private:
    int k_;
    double data_;
};

class CaseNotTabulated : public Error {
public:
    using Error::Error;
};

class IrrationalInput : public Error {
public:
    using Error::Error;
};

class CalibrationUnstable : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class OracleUnavailable : public Error {
public:
    using Error::Error;
};

}  // namespace mixedpde
