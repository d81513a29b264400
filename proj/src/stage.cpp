#include "campus/stage.hpp"

namespace campus {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Tutorial: return "tutorial";
    case Stage::Journey1: return "journey-1";
    case Stage::AgathaChristie: return "agatha-christie";
    case Stage::Journey2: return "journey-2";
    case Stage::GalileoGalilei: return "galileo-galilei";
    case Stage::ExamClassroom: return "exam-classroom";
    case Stage::Completed: return "completed";
  }
  return "unknown";
}

std::string_view to_string(StageCategory c) {
  switch (c) {
    case StageCategory::StartEnd: return "start-end";
    case StageCategory::MainBuildingTask: return "main-building-task";
    case StageCategory::Navigation: return "navigation";
  }
  return "unknown";
}

std::optional<Stage> stage_from_string(std::string_view name) {
  for (Stage s : kStageOrder) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

}  // namespace campus
