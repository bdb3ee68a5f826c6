#ifndef TZLAB_ERRORS_HPP
#define TZLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tzlab {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define TZLAB_DEFINE_ERROR(Name)                                            \
    struct Name final : Error {                                             \
        explicit Name(const std::string& m) : Error(std::string(#Name) + ": " + m) {} \
    }

TZLAB_DEFINE_ERROR(ZeroPole);               // element pole alpha = 0
TZLAB_DEFINE_ERROR(ConeLine);               // line lies on the degeneracy cone
TZLAB_DEFINE_ERROR(AtPole);                 // evaluation at (or too near) a pole
TZLAB_DEFINE_ERROR(PoleCollision);          // incompatible pole pair (alpha1^3 = +-alpha2^3, or lambda^3 = -alpha^3)
TZLAB_DEFINE_ERROR(GammaCollision);         // gamma = -gamma1 in the classical transform
TZLAB_DEFINE_ERROR(OpenConditionViolated);  // tilde line landed on the cone at too many nodes
TZLAB_DEFINE_ERROR(DegenerateKernel);       // numerical kernel of A F(alpha) P not 1-dimensional
TZLAB_DEFINE_ERROR(NonRealOutput);          // imaginary part above tolerance where a real grid is promised
TZLAB_DEFINE_ERROR(NonTraceFree);           // eigenspace projection of a non-trace-free matrix
TZLAB_DEFINE_ERROR(FrameDegenerate);        // moving frame (X_u, X_v, X) numerically dependent
TZLAB_DEFINE_ERROR(EmptyGrid);              // not enough unmasked nodes to export
TZLAB_DEFINE_ERROR(BadArgument);            // invalid parameter (breather argument range, grid spec, ...)
TZLAB_DEFINE_ERROR(NonPositiveH);           // frame gauge w = ln h undefined (h <= 0)
TZLAB_DEFINE_ERROR(ZeroLambda);             // spectral parameter 0
TZLAB_DEFINE_ERROR(SingularMatrix);         // inversion of a numerically singular matrix
TZLAB_DEFINE_ERROR(ZeroH);                  // division by vanishing conformal factor
TZLAB_DEFINE_ERROR(AllMasked);              // no usable nodes remain after masking
TZLAB_DEFINE_ERROR(IoError);                // file I/O failure

#undef TZLAB_DEFINE_ERROR

} // namespace tzlab

#endif // TZLAB_ERRORS_HPP
