#pragma once

namespace xeig {

enum class Status { In, Out, Unknown };
enum class Mode { Analytic, Sampled };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::In: return "In";
    case Status::Out: return "Out";
    case Status::Unknown: return "Unknown";
  }
  return "";
}

inline const char* to_string(Mode m) { return m == Mode::Analytic ? "analytic" : "sampled"; }

}  // namespace xeig
