#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace campus {

enum class Stage {
  Tutorial,
  Journey1,
  AgathaChristie,
  Journey2,
  GalileoGalilei,
  ExamClassroom,
  Completed,
};

enum class StageCategory { StartEnd, MainBuildingTask, Navigation };

inline constexpr std::array<Stage, 7> kStageOrder{
    Stage::Tutorial,       Stage::Journey1,      Stage::AgathaChristie, Stage::Journey2,
    Stage::GalileoGalilei, Stage::ExamClassroom, Stage::Completed,
};

constexpr StageCategory category(Stage s) {
  switch (s) {
    case Stage::AgathaChristie:
    case Stage::GalileoGalilei: return StageCategory::MainBuildingTask;
    case Stage::Journey1:
    case Stage::Journey2: return StageCategory::Navigation;
    default: return StageCategory::StartEnd;
  }
}

// Successor in the linear chain; nullopt after Completed.
constexpr std::optional<Stage> next_stage(Stage s) {
  if (s == Stage::Completed) return std::nullopt;
  return static_cast<Stage>(static_cast<int>(s) + 1);
}

std::string_view to_string(Stage s);
std::string_view to_string(StageCategory c);
std::optional<Stage> stage_from_string(std::string_view name);

}  // namespace campus
