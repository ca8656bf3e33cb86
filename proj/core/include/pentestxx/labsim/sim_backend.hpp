#pragma once

#include <memory>

#include "pentestxx/labsim/fixture.hpp"
#include "pentestxx/toolio/backend.hpp"

namespace pentestxx::labsim {

/// First line of the stand-in file written when an archive is copied off a
/// simulated share; the sim's zip2john/unzip recognize it.
inline constexpr std::string_view kArchiveMarker = "PENTESTXX-SIM-ARCHIVE 1";

/// A ToolBackend answering every command the engine issues from the fixture.
/// Each instance owns its own mutable state (cookie sessions, uploads,
/// mounts, listeners), so separate sessions never observe each other.
std::unique_ptr<toolio::ToolBackend> make_sim_backend(std::shared_ptr<const LabFixture> fixture);

}  // namespace pentestxx::labsim
