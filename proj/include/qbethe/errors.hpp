#pragma once

#include <stdexcept>
#include <string>

namespace qbethe {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Series arithmetic / evaluation.
class EmptyTrustWindow : public Error { public: using Error::Error; };
class UntrustedEvaluation : public Error { public: using Error::Error; };
class PoleHit : public Error { public: using Error::Error; };

// Bethe system.
class DegenerateRoots : public Error { public: using Error::Error; };
class RootFindFailure : public Error { public: using Error::Error; };
class NonVanishingRemainder : public Error { public: using Error::Error; };
class StructureViolation : public Error { public: using Error::Error; };

// H-series and matrix products.
class Resonance : public Error { public: using Error::Error; };
class NonConvergentProduct : public Error { public: using Error::Error; };

// Theta / zero extraction.
class ZeroCountMismatch : public Error { public: using Error::Error; };
class NormalizationFailure : public Error { public: using Error::Error; };

// Identity checks.
class ProbeAtPole : public Error { public: using Error::Error; };
class ZeroDenominator : public Error { public: using Error::Error; };
class NonConvergentTail : public Error { public: using Error::Error; };
class RegionViolation : public Error { public: using Error::Error; };

// CLI / configuration.
class ConfigError : public Error { public: using Error::Error; };

} // namespace qbethe
