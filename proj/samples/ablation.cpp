// Runs the three ablation arms on every synthetic preset and prints the
// metric rows.
#include <iostream>

#include "motseg.hpp"

int main() {
  using namespace motseg;
  PipelineConfig full, no_str, no_reid, neither;
  no_str.tracker.enable_str = false;
  no_reid.reid.enabled = false;
  neither.tracker.enable_str = false;
  neither.reid.enabled = false;
  const std::vector<std::pair<std::string, PipelineConfig>> configs{
      {"full", full}, {"no-str", no_str}, {"no-reid", no_reid}, {"neither", neither}};
  for (const ScenarioSpec& s : {scenario_a(), scenario_b(), scenario_c(), scenario_c(CameraMode::kStatic)}) {
    std::cout << s.name << '\n';
    print_ablation(ablation_compare(s, configs), std::cout);
    std::cout << '\n';
  }
}
