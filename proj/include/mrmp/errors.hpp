#pragma once

#include <stdexcept>
#include <string>

namespace mrmp
{
    struct Error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct RoadmapError : Error
    {
        RoadmapError (std::size_t robot, const std::string &what)
            : Error ("roadmap for robot " + std::to_string (robot + 1) + ": " + what), robot_index (robot)
        {
        }
        std::size_t robot_index;
    };

    struct SamplingError : Error
    {
        using Error::Error;
    };

    struct ClassificationError : Error
    {
        using Error::Error;
    };

    /// Scenario or experiment input that fails validation; `field` names the culprit.
    struct ScenarioError : Error
    {
        ScenarioError (std::string f, const std::string &what) : Error (f + ": " + what), field (std::move (f)) {}
        std::string field;
    };

} // namespace mrmp
