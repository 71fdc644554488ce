#ifndef VNFCONS_ILP_H_
#define VNFCONS_ILP_H_

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vnfcons/costs.h"
#include "vnfcons/embedding.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons {

enum class VarKind { kBinary, kInteger, kContinuous };
enum class Relation { kLe, kEq, kGe };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLe;
  double rhs = 0.0;
};

// A minimization MILP with named variables and rows. Row names start with
// a family prefix ("cap.3", "src.0.2") that FamilyOf() recovers.
class LinearModel {
 public:
  int AddVariable(std::string name, VarKind kind, double lower = 0.0,
                  double upper = kInfinity);
  void AddConstraint(std::string name, std::vector<Term> terms,
                     Relation relation, double rhs);
  void SetObjective(std::vector<Term> terms) { objective_ = std::move(terms); }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  std::optional<int> FindVariable(std::string_view name) const;
  // Throws std::out_of_range for an unknown name.
  int Var(std::string_view name) const;
  std::size_t CountKind(VarKind kind) const;
  // Number of variables whose name starts with `prefix` followed by '.'.
  std::size_t CountPrefix(std::string_view prefix) const;

 private:
  std::vector<Variable> variables_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
};

// Row family: the name up to the first '.'.
std::string FamilyOf(std::string_view row_name);

// Rows whose strict inequality was relaxed by eps.
bool IsEpsFamily(std::string_view family);

struct BigM {
  double m_gamma = 0.0;  // > max node cores
  double m_f = 0.0;      // > number of VNF types
  double eps = 1e-6;     // strict-inequality slack, in (0, 1e-6]
};

// Smallest integral constants satisfying the invariants, with eps = 1e-6.
BigM DefaultBigM(const Scenario& scenario);

// Builds the full placement model for the sharing cost model: request
// placement with instance sizing and sharing overhead, per-virtual-link
// routing over every (link, x, y) combination, bandwidth, end-to-end
// latency and node activity. Links with infinite bandwidth get no
// bandwidth row. Throws std::invalid_argument if `bigm` violates its
// invariants.
LinearModel BuildModel(const Scenario& scenario, const BigM& bigm);
LinearModel BuildModel(const Scenario& scenario);

// CPLEX LP text. Byte-deterministic; numbers use the shortest exact
// decimal form so that ParseLp followed by ExportLp reproduces the input.
std::string ExportLp(const LinearModel& model);
// Reads the subset of LP format produced by ExportLp. Throws ParseError.
LinearModel ParseLp(std::string_view text);

// Variable values that encode `emb` in the model built from `scenario`.
// Variables the embedding does not touch are zero.
std::vector<double> NaturalAssignment(const LinearModel& model,
                                      const Scenario& scenario,
                                      const Embedding& emb);

struct RowViolation {
  std::string name;
  double excess = 0.0;
};

// Rows (and bounds or integrality, reported under the variable's name)
// violated by more than `tol`; eps rows get an extra `eps_slack`.
std::vector<RowViolation> CheckAssignment(const LinearModel& model,
                                          const std::vector<double>& values,
                                          double tol = 1e-9,
                                          double eps_slack = 1e-6);

class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactLimits {
  int max_nfv_nodes = 5;
  int max_requests = 8;
};

enum class ExactStatus { kOptimal, kInfeasible };

struct ExactSolution {
  ExactStatus status = ExactStatus::kInfeasible;
  int objective = 0;  // active nodes
  Embedding embedding;
  long long assignments_explored = 0;
};

// Exhaustive branch-and-bound over request-to-node assignments in
// lexicographic order (SFCs in input order, requests in chain order, NFV
// nodes by id). Instances are sized minimally and virtual links follow
// latency shortest paths, which is exact when no link has finite bandwidth.
// Returns the first assignment with the fewest active nodes. Throws
// LimitError if the scenario exceeds `limits` or has a finite-bandwidth
// link.
ExactSolution SolveExact(const Scenario& scenario,
                         const ExactLimits& limits = {});

}  // namespace vnfcons

#endif  // VNFCONS_ILP_H_
