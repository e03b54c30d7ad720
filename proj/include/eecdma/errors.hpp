#ifndef EECDMA_ERRORS_HPP
#define EECDMA_ERRORS_HPP

#include <stdexcept>

namespace eecdma {

// One exception type per failure mode of the numerical pipeline.

struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxIterations : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DelayOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroFilter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroSignature : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroPower : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioRedrawExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace eecdma

#endif  // EECDMA_ERRORS_HPP
