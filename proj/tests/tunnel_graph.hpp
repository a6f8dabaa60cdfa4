#pragma once

// Hand-encoded equivalence graph of the tunnel with two robots: six stacked
// classes (both robots in one arm, two orders) and six split classes.

#include <string>
#include <utility>
#include <vector>

namespace mrmp::oracle
{
inline const std::vector<std::pair<std::string, std::string>> kTwoRobotEdges = {
    {"[(1,2),(),()]", "[(1),(2),()]"}, {"[(1,2),(),()]", "[(1),(),(2)]"}, {"[(2,1),(),()]", "[(2),(1),()]"},
    {"[(2,1),(),()]", "[(2),(),(1)]"}, {"[(),(1,2),()]", "[(2),(1),()]"}, {"[(),(1,2),()]", "[(),(1),(2)]"},
    {"[(),(2,1),()]", "[(1),(2),()]"}, {"[(),(2,1),()]", "[(),(2),(1)]"}, {"[(),(),(1,2)]", "[(2),(),(1)]"},
    {"[(),(),(1,2)]", "[(),(2),(1)]"}, {"[(),(),(2,1)]", "[(1),(),(2)]"}, {"[(),(),(2,1)]", "[(),(1),(2)]"},
    {"[(1),(2),()]", "[(1),(),(2)]"},  {"[(1),(2),()]", "[(),(2),(1)]"},  {"[(2),(1),()]", "[(2),(),(1)]"},
    {"[(2),(1),()]", "[(),(1),(2)]"},  {"[(1),(),(2)]", "[(),(1),(2)]"},  {"[(2),(),(1)]", "[(),(2),(1)]"},
};
} // namespace mrmp::oracle
