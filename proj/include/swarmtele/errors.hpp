#pragma once

#include <stdexcept>
#include <string>

namespace swarmtele {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Topology
class NotATree : public Error { public: using Error::Error; };
class BadIndex : public Error { public: using Error::Error; };
class NonPositiveWeight : public Error { public: using Error::Error; };
class EdgeTooLong : public Error { public: using Error::Error; };

// Potential / controller domain: an edge reached the communication radius.
class OutOfDomain : public Error { public: using Error::Error; };

class SingularInertia : public Error { public: using Error::Error; };

class DesignInfeasible : public Error { public: using Error::Error; };
class AssumptionViolated : public Error { public: using Error::Error; };
class LinkBroken : public Error { public: using Error::Error; };

// Verifier
class WrongProfile : public Error { public: using Error::Error; };
class PrerequisiteFailed : public Error { public: using Error::Error; };

// I/O
class SchemaError : public Error { public: using Error::Error; };
class TraceLoadError : public Error { public: using Error::Error; };

}  // namespace swarmtele
