#pragma once

#include <stdexcept>
#include <string>

namespace cra {

// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input or a request outside the domain of an operation. The CLI maps
// these to exit code 2.
class domain_error : public error {
public:
    using error::error;
};

// g2^3 = 27 g3^2: the period lattice collapses (Kepler limit, homoclinic orbit).
class degenerate_lattice_error : public domain_error {
public:
    using domain_error::domain_error;
};

// alpha = 0 turns f(r) into a quadratic.
class quadratic_degeneracy_error : public domain_error {
public:
    using domain_error::domain_error;
};

class infeasible_state_error : public domain_error {
public:
    using domain_error::domain_error;
};

class pole_error : public domain_error {
public:
    using domain_error::domain_error;
};

class unbounded_motion_error : public domain_error {
public:
    using domain_error::domain_error;
};

class bracket_error : public domain_error {
public:
    using domain_error::domain_error;
};

class no_solution_error : public domain_error {
public:
    using domain_error::domain_error;
};

// A numerical procedure failed to converge. Signals a bug or a pathological
// instance rather than bad input; the CLI maps it to exit code 3.
class convergence_error : public error {
public:
    using error::error;
};

} // namespace cra
