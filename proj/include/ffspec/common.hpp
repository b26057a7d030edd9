#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ffspec {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Raised for numerical failures; the CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(module) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

// Invalid input or configuration; exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { Plain, Negativity };

inline cplx tau_of(Kind kind) { return kind == Kind::Plain ? cplx(1.0, 0.0) : I; }
inline double tau2_of(Kind kind) { return kind == Kind::Plain ? 1.0 : -1.0; }
inline const char* kind_name(Kind kind) { return kind == Kind::Plain ? "plain" : "negativity"; }

enum class Growth { GrowL, GrowK };

inline const char* growth_name(Growth g) { return g == Growth::GrowL ? "grow_l" : "grow_k"; }

}  // namespace ffspec
