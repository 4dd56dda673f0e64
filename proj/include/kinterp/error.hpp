#pragma once

#include <stdexcept>
#include <string>

namespace kinterp {

// Base of every error thrown by the library. The CLI exits with 2 for config_error and io_error
// and 1 for the rest.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define KINTERP_DEFINE_ERROR(name) \
    class name : public error {    \
    public:                        \
        using error::error;        \
    }

KINTERP_DEFINE_ERROR(parameter_error);      // kernel or config parameter outside its domain
KINTERP_DEFINE_ERROR(domain_error);         // argument outside an operation's domain
KINTERP_DEFINE_ERROR(resource_error);       // point/grid/quadrature budget exceeded
KINTERP_DEFINE_ERROR(geometry_error);       // duplicate points, points outside the box
KINTERP_DEFINE_ERROR(unisolvency_error);    // polynomial block rank deficient
KINTERP_DEFINE_ERROR(conditioning_error);   // factorization breakdown or residual check failure
KINTERP_DEFINE_ERROR(numerical_error);      // quadratic form negative beyond round-off
KINTERP_DEFINE_ERROR(stencil_error);        // local polynomial reproduction stencil not unisolvent
KINTERP_DEFINE_ERROR(quadrature_error);     // quadrature did not resolve the requested quantity
KINTERP_DEFINE_ERROR(smoothness_error);     // bump too rough for the requested operator
KINTERP_DEFINE_ERROR(resolution_error);     // grid too coarse for a finite-difference stencil
KINTERP_DEFINE_ERROR(insufficient_data_error);
KINTERP_DEFINE_ERROR(config_error);
KINTERP_DEFINE_ERROR(io_error);

#undef KINTERP_DEFINE_ERROR

}  // namespace kinterp
