#include <sstream>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/io.h"
#include "rasl/simulate.h"

namespace rasl {
namespace {

void ExpectParseError(const std::string& text, const std::string& where, bool graph) {
  std::istringstream in(text);
  try {
    if (graph) {
      ReadPoseGraph(in, "f.g2o");
    } else {
      ReadCorrespondences(in, "f.txt");
    }
    ADD_FAILURE() << "accepted: " << text;
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(err.what()).find(where), std::string::npos) << err.what();
  }
}

TEST(PoseGraphIo, RoundTrip) {
  SimulationSpec spec;
  spec.num_frames = 20;
  spec.rotation_noise = DegToRad(1.0);
  spec.direction_noise = DegToRad(1.0);
  const SyntheticScene scene = SimulateScene(spec);
  const PoseGraph graph = scene.ToPoseGraph();
  std::stringstream ss;
  WritePoseGraph(ss, graph);
  const PoseGraph back = ReadPoseGraph(ss);
  ASSERT_EQ(back.ids, graph.ids);
  ASSERT_EQ(back.edges.size(), graph.edges.size());
  for (std::size_t k = 0; k < graph.poses.size(); ++k) {
    EXPECT_LT(AngularDistance(back.poses[k].rotation, graph.poses[k].rotation), 1e-12);
    EXPECT_LT((back.poses[k].translation - graph.poses[k].translation).norm(), 1e-12);
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    EXPECT_EQ(back.edges[e].i, graph.edges[e].i);
    EXPECT_EQ(back.edges[e].j, graph.edges[e].j);
    EXPECT_LT(AngularDistance(back.edges[e].rotation, graph.edges[e].rotation), 1e-12);
    EXPECT_LT((back.edges[e].direction - graph.edges[e].direction).norm(), 1e-12);
  }
}

TEST(PoseGraphIo, Conventions) {
  // Vertex quaternion is camera-to-world; edge t is the baseline in frame i.
  std::istringstream in(
      "VERTEX_SE3:QUAT 0 0 0 0 0 0 0 1\n"
      "VERTEX_SE3:QUAT 1 1 0 0 0 0 0.7071067811865476 0.7071067811865476\n"
      "EDGE_SE3:QUAT 0 1 2 0 0 0 0 0.7071067811865476 0.7071067811865476\n"
      "EDGE_SE3:QUAT 1 0 0 0 0 0 0 0 1 "
      "1 0 0 0 0 0 1 0 0 0 0 1 0 0 0 1 0 0 1 0 1\n");
  const PoseGraph g = ReadPoseGraph(in);
  ASSERT_EQ(g.edges.size(), 2u);
  const Rotation rz = Rotation::FromAngleAxis(kPi / 2.0, Eigen::Vector3d::UnitZ());
  EXPECT_LT(AngularDistance(g.poses[1].rotation, rz.Inverse()), 1e-12);
  EXPECT_LT(AngularDistance(g.edges[0].rotation, rz.Inverse()), 1e-12);
  EXPECT_LT((g.edges[0].direction - Eigen::Vector3d::UnitX()).norm(), 1e-15);
  EXPECT_FALSE(g.edges[1].direction_reliable);
}

TEST(PoseGraphIo, Errors) {
  ExpectParseError("VERTEX_SE3:QUAT 0 0 0 0 0 0 0 1\nVERTEX_SE3:QUAT 1 0 0\n", "f.g2o:2", true);
  ExpectParseError("FOO 1 2\n", "f.g2o:1", true);
  ExpectParseError("VERTEX_SE3:QUAT 0 0 0 0 0 0 0 1\nEDGE_SE3:QUAT 0 1 1 0 0 0 0 0 1\n",
                   "missing vertex", true);
  ExpectParseError("VERTEX_SE3:QUAT 0 0 0 0 0 0 0 1\nVERTEX_SE3:QUAT 1 0 0 0 0 0 0 1\n"
                   "EDGE_SE3:QUAT 0 1 1 0 0 0 0 0 1 5 5\n",
                   "f.g2o:3", true);
}

TEST(CorrespondenceIo, RoundTripAndGrouping) {
  std::istringstream in(
      "# comment\n"
      "CORRS v1 640 480\n"
      "MATCH 0 1 10 20 11 21 0.5\n"
      "MATCH 1 2 30 40 31 41 0.25\n"
      "MATCH 0 1 50 60 51 61 1\n");
  const CorrespondenceFile file = ReadCorrespondences(in, "c.txt");
  ASSERT_EQ(file.sets.size(), 2u);
  EXPECT_EQ(file.sets[0].matches.size(), 2u);
  EXPECT_EQ(file.sets[1].frame_i, 1);
  std::stringstream ss;
  WriteCorrespondences(ss, file);
  const CorrespondenceFile back = ReadCorrespondences(ss, "c2.txt");
  ASSERT_EQ(back.sets.size(), 2u);
  EXPECT_EQ(back.sets[0].matches[1].p_j, file.sets[0].matches[1].p_j);
  EXPECT_EQ(back.sets[1].matches[0].confidence, 0.25);
}

TEST(CorrespondenceIo, Errors) {
  ExpectParseError("MATCH 0 1 1 1 1 1 1\n", "f.txt:1", false);
  ExpectParseError("CORRS v1 640 480\nMATCH 0 1 1 1 1 1\n", "f.txt:2", false);
  ExpectParseError("CORRS v1 640 480\nMATCH 0 1 1 1 1 1 1\nMATCH 0 1 700 1 1 1 1\n",
                   "f.txt:3", false);
  ExpectParseError("CORRS v1 640 480\nMATCH 0 1 1 1 1 1 2\n", "f.txt:2", false);
  ExpectParseError("CORRS v1 640 480\nMATCH 0 0 1 1 1 1 1\n", "f.txt:2", false);
  ExpectParseError("", "header", false);
}

TEST(RotationsIo, CameraToWorldQuaternion) {
  std::ostringstream out;
  const Rotation rz = Rotation::FromAngleAxis(kPi / 2.0, Eigen::Vector3d::UnitZ());
  WriteRotations(out, {7}, {rz.Inverse()});
  std::istringstream in(out.str());
  int id;
  double x, y, z, w;
  in >> id >> x >> y >> z >> w;
  EXPECT_EQ(id, 7);
  EXPECT_NEAR(std::abs(z), std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(z * w, 0.5, 1e-9);
}

}  // namespace
}  // namespace rasl
