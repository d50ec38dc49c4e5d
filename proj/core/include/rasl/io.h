#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rasl/correspond.h"
#include "rasl/pose_graph.h"

namespace rasl {

struct CorrespondenceFile {
  double image_width = 0.0;
  double image_height = 0.0;
  // One set per frame pair, in order of first appearance.
  std::vector<CorrespondenceSet> sets;
};

// "CORRS v1 <w> <h>" header, then "MATCH i j u_i v_i u_j v_j confidence".
// '#' starts a comment. Errors are kParseError naming name:line.
CorrespondenceFile ReadCorrespondences(std::istream& in,
                                       const std::string& name = "<stream>");
CorrespondenceFile ReadCorrespondenceFile(const std::string& path);
void WriteCorrespondences(std::ostream& out, const CorrespondenceFile& file);
void WriteCorrespondenceFile(const std::string& path,
                             const CorrespondenceFile& file);

// True if the first non-comment token of the file is "CORRS".
bool LooksLikeCorrespondenceFile(const std::string& path);

// g2o subset: VERTEX_SE3:QUAT id c qx qy qz qw (camera-to-world quaternion)
// and EDGE_SE3:QUAT i j t q [21 information values, ignored], where q is the
// rotation R_i R_j^T and t the unit direction R_i (c_j - c_i). A zero t marks
// an edge without a usable direction.
PoseGraph ReadPoseGraph(std::istream& in, const std::string& name = "<stream>");
PoseGraph ReadPoseGraphFile(const std::string& path);
void WritePoseGraph(std::ostream& out, const PoseGraph& graph);
void WritePoseGraphFile(const std::string& path, const PoseGraph& graph);

// "id qx qy qz qw" per line (camera-to-world quaternion).
void WriteRotations(std::ostream& out, const std::vector<int>& ids,
                    const std::vector<Rotation>& rotations);

}  // namespace rasl
