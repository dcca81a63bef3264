#pragma once

#include <stdexcept>
#include <string>

namespace osl {

// Base class for everything this library throws on purpose.  Callers that
// want blanket handling catch osl::Error; tests usually catch the concrete
// type to make sure the right condition fired.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define OSL_DEFINE_ERROR(Name)       \
  struct Name : Error {              \
    using Error::Error;              \
  }

// Input / precondition violations.
OSL_DEFINE_ERROR(MalformedInput);      // unparseable word, json, csv, flag value
OSL_DEFINE_ERROR(TrivialWord);         // a conjugacy class collapsed to the identity
OSL_DEFINE_ERROR(NotABasis);           // a tuple of words does not freely generate
OSL_DEFINE_ERROR(NonPositiveLength);   // edge length <= 0
OSL_DEFINE_ERROR(DegenerateEdge);      // an edge image tightened to nothing
OSL_DEFINE_ERROR(DisconnectedGraph);
OSL_DEFINE_ERROR(MarkingMismatch);     // maps or comparisons across different bases
OSL_DEFINE_ERROR(BadParams);           // scene / CLI parameter out of range

// Folding engine.
OSL_DEFINE_ERROR(NoFolding);           // every prescribed fold speed is zero
OSL_DEFINE_ERROR(NoIllegalTurns);      // asked to fold a map that is already immersed
OSL_DEFINE_ERROR(TimeBeyondEvent);     // fold time past the first combinatorial event
OSL_DEFINE_ERROR(StalledPath);         // a path stopped making progress toward its target
OSL_DEFINE_ERROR(PartialTension);      // operation requires the whole graph maximally stretched

// Fiber / weight machinery.
OSL_DEFINE_ERROR(ExcursionBoundExceeded);  // lift search ran out of allowed excursion
OSL_DEFINE_ERROR(MalformedTree);           // weight recursion found no applicable step
OSL_DEFINE_ERROR(CertificateFailure);      // an internal exact identity failed to hold

#undef OSL_DEFINE_ERROR

}  // namespace osl
