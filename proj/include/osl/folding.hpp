#pragma once
// Event-exact folding engine: speed assignments, maximal safe fold time,
// single fold steps producing quotient graphs with maintained maps, greedy
// and standard paths, and the length-derivative formula.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osl/graphmap.hpp"

namespace osl {

struct SpeedAssignment {
  // One nonnegative speed per illegal turn, aligned with
  // TrainTrack::illegal_turns.
  std::vector<Rational> speeds;
  // |S|: the exact rate at which folding loses volume; see derive_loss_speed.
  Rational loss_speed = 0;
};

// Speed 1 on every illegal turn. Throws NoIllegalTurns when there are none.
// The loss speed is filled in.
SpeedAssignment greedy_speeds(const TrainTrack& tt);

// Wraps a raw speed vector and fills the loss speed.
SpeedAssignment make_assignment(const TrainTrack& tt, std::vector<Rational> speeds);

// Computes |S|: processing turns by speed descending, every union of two
// still-separate direction strands loses one strand over a depth interval
// proportional to that speed, so |S| is the sum of speeds over successful
// merges (a maximum-weight spanning forest per gate).
void derive_loss_speed(const TrainTrack& tt, SpeedAssignment& s);

// Pairwise identification depths within one gate at time t: the bottleneck
// (max-min over chains) closure of the direct turn speeds, times t. Keys are
// ordered pairs (a < b). The table is an ultrametric.
std::map<std::pair<Half, Half>, Rational> effective_depths(
    const std::vector<Half>& gate, const TrainTrack& tt,
    const SpeedAssignment& s, const Rational& t);

struct FoldEvent {
  Rational time = 0;
  // "arrival" | "edge-consumed" | "fold-collision" | "image-divergence",
  // which is also the tie-breaking priority order.
  std::string kind;
  std::string description;
};

// The largest t for which folding at these speeds stays legal, with the
// binding constraint. Requires the whole domain to be tension (throws
// PartialTension otherwise); throws NoFolding when all speeds vanish.
FoldEvent max_fold_time(const GraphMap& m, const TrainTrack& tt,
                        const SpeedAssignment& s);

struct FoldStep {
  MarkedGraph graph;  // the quotient, normalized to volume 1
  GraphMap forward;   // domain -> graph; constant stretch 1/(1 - t|S|)
  GraphMap leftover;  // graph -> a subdivided copy of the codomain;
                      // constant stretch max_stretch * (1 - t|S|)
  Rational volume_raw = 1;  // quotient volume before normalization
};

// Folds every gate to its effective depths at time t and returns the
// quotient with both maintained maps. Every certificate (piece lengths,
// image agreement of glued pieces, volume loss, stretch uniformity) is
// checked exactly and throws CertificateFailure on violation.
FoldStep fold_step(const GraphMap& m, const TrainTrack& tt,
                   const SpeedAssignment& s, const Rational& t);

struct LengthDerivative {
  Rational value;      // |alpha|_domain - vanishing
  Rational vanishing;  // 2 sum_{turns crossed} s_tau / |S|
};

// Derivative of the normalized length of alpha with respect to arclength at
// the start of the fold. Throws NoFolding when |S| = 0.
LengthDerivative length_derivative(const GraphMap& m, const TrainTrack& tt,
                                   const SpeedAssignment& s,
                                   const ConjugacyClass& alpha);

// Exact length of alpha at time t (before the first event):
// (|alpha|_x - 2 t sum_{turns crossed} s_tau) / (1 - t |S|).
Rational length_at(const GraphMap& m, const TrainTrack& tt,
                   const SpeedAssignment& s, const ConjugacyClass& alpha,
                   const Rational& t);

struct Breakpoint {
  std::string event;  // "start" | "rescale" | a FoldEvent kind
  Rational lambda_from_origin;
  Rational lambda_to_target;
  Rational volume_raw;
  MarkedGraph graph;  // normalized
  std::optional<GraphMap> map_from_origin;
  std::optional<GraphMap> leftover_map;
};

struct PathTrace {
  MarkedGraph origin;
  MarkedGraph target;
  std::vector<Breakpoint> points;
  std::vector<ConjugacyClass> tracked;
};

// Chooses the speeds for one fold segment, given the current left-over map
// and its train track.
using SpeedProvider =
    std::function<SpeedAssignment(const GraphMap&, const TrainTrack&)>;

struct StopPolicy {
  int max_segments = 10000;
};

// Folds segment by segment (speeds -> event -> quotient -> re-derived train
// track) until the target is reached, asserting the geodesic identity
// lambda(origin, here) * lambda(here, target) = lambda(origin, target) at
// every breakpoint. Throws StalledPath when the segment cap is exceeded.
PathTrace fold_path(const GraphMap& m, const SpeedProvider& provider,
                    const StopPolicy& stop = {});

// A linear rescaling segment onto the image-length metric, then greedy
// folding: the standard two-part geodesic.
PathTrace standard_path(const MarkedGraph& x, const MarkedGraph& y);

// CSV with columns s, lambda_from_origin, lambda_to_target, volume_raw,
// event, then one len[word] column per tracked loop.
std::string trace_csv(const PathTrace& t);

}  // namespace osl
