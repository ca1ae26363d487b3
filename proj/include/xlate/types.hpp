// Core enums and small value types shared across the harness.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace xlate {

enum class Lang { Python, Java };

// Translation direction, e.g. Python -> Java.
struct Direction {
  Lang source;
  Lang target;

  bool operator==(const Direction&) const = default;
  auto operator<=>(const Direction&) const = default;
};

enum class Approach { Direct, AlgorithmBased };

enum class Verdict { Correct, CompileError, RuntimeError, TestFailure, Timeout };

enum class Stage { Compile, Runtime };

// Failure subtypes. RE* apply to the runtime stage only, CE* to compile only.
enum class Subtype {
  RE1, RE2, RE3, RE4, RE5, RE6,
  CE1, CE2, CE3, CE4, CE5, CE6, CE7,
};

inline constexpr std::array<Subtype, 6> kRuntimeSubtypes = {
    Subtype::RE1, Subtype::RE2, Subtype::RE3,
    Subtype::RE4, Subtype::RE5, Subtype::RE6};

inline constexpr std::array<Subtype, 7> kCompileSubtypes = {
    Subtype::CE1, Subtype::CE2, Subtype::CE3, Subtype::CE4,
    Subtype::CE5, Subtype::CE6, Subtype::CE7};

inline constexpr std::array<Subtype, 13> kAllSubtypes = {
    Subtype::RE1, Subtype::RE2, Subtype::RE3, Subtype::RE4,
    Subtype::RE5, Subtype::RE6, Subtype::CE1, Subtype::CE2,
    Subtype::CE3, Subtype::CE4, Subtype::CE5, Subtype::CE6,
    Subtype::CE7};

// Display name, e.g. "Python".
std::string_view lang_name(Lang lang);
// Corpus/key form, e.g. "python".
std::string_view lang_key(Lang lang);
std::optional<Lang> lang_from_key(std::string_view key);

// Key form "python-java"; also accepts "python->java" on parse.
std::string direction_key(const Direction& d);
std::optional<Direction> direction_from_key(std::string_view key);

std::string_view approach_key(Approach a);
std::optional<Approach> approach_from_key(std::string_view key);

std::string_view verdict_key(Verdict v);
std::optional<Verdict> verdict_from_key(std::string_view key);

std::string_view stage_key(Stage s);

std::string_view subtype_key(Subtype s);             // "RE1"
std::string_view subtype_long_name(Subtype s);       // "Dependency & Entry-Point Issues"
Stage subtype_stage(Subtype s);
std::optional<Subtype> subtype_from_key(std::string_view key);

}  // namespace xlate
