#ifndef LSG_CLI_HPP
#define LSG_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsg/hplanner.hpp"
#include "lsg/mission.hpp"

namespace lsg::cli
{

enum ExitCode : int { kOk = 0, kInputError = 2, kMissionAbort = 3, kPlanningFailure = 4 };

/// Bundled scenario name ("two_cars") or a path to a scenario file.
std::filesystem::path resolve_scenario_path(const std::string & name_or_path);

std::string metrics_csv(const std::vector<mission::MetricsSample> & trace);
std::string events_log(const mission::MissionResult & r);
nlohmann::json plan_to_json(const hp::PlanResult & plan, bool timing);
/// Human readable route summary, one block per query.
std::string plan_summary(const std::string & query, const hp::PlanResult & plan, bool timing);

struct CompareRow
{
  int id{0};
  double hp_time_ms{0.0};
  double vp_time_ms{0.0};
  double hp_len_m{0.0};
  double vp_len_m{0.0};
  double straight_m{0.0};
};

struct CompareResult
{
  std::vector<CompareRow> rows;
  int skipped{0};
};

/// Random pose-to-pose navigation queries answered by both planners on the
/// end-of-mission graph. HP time is the layer search time only.
CompareResult compare_planners(const sim::Scenario & scenario, const mission::MissionConfig & config,
  const mission::MissionResult & mission, int n, std::uint64_t seed);

std::string compare_csv(const CompareResult & r, bool timing);

/// Entry point of the `lsg` executable; returns the process exit code.
int run(const std::vector<std::string> & args, std::istream & in, std::ostream & out,
  std::ostream & err);

}  // namespace lsg::cli

#endif  // LSG_CLI_HPP
