#include "osc/dataset_io.hpp"

#include <cstring>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "osc/error.hpp"
#include "test_support.hpp"

namespace osc {
namespace {

using testing::ScratchDir;

void AppendU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void AppendF32(std::vector<unsigned char>& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  AppendU32(out, bits);
}

ErrorCategory CategoryOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCategory::kConfig;
}

const char* kIdentityPose = "1 0 0 0 0 1 0 0 0 0 1 0\n";

TEST(ReadPointCloud, DecodesTwoPoints) {
  ScratchDir dir("bin");
  std::vector<unsigned char> bytes;
  for (float f : {1.f, 2.f, 3.f, 0.5f, 4.f, 5.f, 6.f, 0.1f}) AppendF32(bytes, f);
  ASSERT_EQ(bytes.size(), 32u);
  testing::WriteBytes(dir / "a.bin", bytes);
  const PointCloud cloud = ReadPointCloud(dir / "a.bin", 9);
  EXPECT_EQ(cloud.frame_id, 9u);
  ASSERT_EQ(cloud.points.size(), 2u);
  EXPECT_EQ(cloud.points[0], (Point{1.f, 2.f, 3.f, 0.5f}));
  EXPECT_EQ(cloud.points[1], (Point{4.f, 5.f, 6.f, 0.1f}));
}

TEST(ReadPointCloud, EmptyFile) {
  ScratchDir dir("bin");
  testing::WriteBytes(dir / "e.bin", {});
  EXPECT_TRUE(ReadPointCloud(dir / "e.bin").points.empty());
}

TEST(ReadPointCloud, RaggedSizeRejected) {
  ScratchDir dir("bin");
  testing::WriteBytes(dir / "r.bin", std::vector<unsigned char>(17, 0));
  EXPECT_EQ(CategoryOf([&] { ReadPointCloud(dir / "r.bin"); }),
            ErrorCategory::kFormat);
}

TEST(ReadPointCloud, NonFiniteRejected) {
  ScratchDir dir("bin");
  std::vector<unsigned char> bytes;
  for (float f : {1.f, std::numeric_limits<float>::quiet_NaN(), 0.f, 0.f}) {
    AppendF32(bytes, f);
  }
  testing::WriteBytes(dir / "n.bin", bytes);
  EXPECT_EQ(CategoryOf([&] { ReadPointCloud(dir / "n.bin"); }),
            ErrorCategory::kFormat);
}

TEST(ReadPointCloud, MissingFile) {
  EXPECT_EQ(CategoryOf([] { ReadPointCloud("/nonexistent/000000.bin"); }),
            ErrorCategory::kIo);
}

TEST(ReadPointCloud, WriteReadBitIdentical) {
  ScratchDir dir("bin");
  Rng rng(5);
  PointCloud cloud;
  for (int i = 0; i < 1000; ++i) {
    cloud.points.push_back({static_cast<float>(UniformReal(rng, -80, 80)),
                            static_cast<float>(UniformReal(rng, -80, 80)),
                            static_cast<float>(UniformReal(rng, -3, 5)),
                            static_cast<float>(UniformReal(rng, 0, 1))});
  }
  WritePointCloud(dir / "c.bin", cloud);
  EXPECT_EQ(std::filesystem::file_size(dir / "c.bin"), 16000u);
  EXPECT_EQ(ReadPointCloud(dir / "c.bin").points, cloud.points);
}

TEST(ReadLabels, ClassInLowHalf) {
  ScratchDir dir("label");
  std::vector<unsigned char> bytes;
  AppendU32(bytes, 0x00000050u);
  AppendU32(bytes, 0x00010050u);
  testing::WriteBytes(dir / "l.label", bytes);
  const SemanticLabels labels = ReadLabels(dir / "l.label", 2);
  EXPECT_EQ(labels.class_ids, (std::vector<std::uint16_t>{80, 80}));
}

TEST(ReadLabels, CountMismatch) {
  ScratchDir dir("label");
  std::vector<unsigned char> bytes;
  for (int i = 0; i < 3; ++i) AppendU32(bytes, 80);
  testing::WriteBytes(dir / "l.label", bytes);
  EXPECT_EQ(CategoryOf([&] { ReadLabels(dir / "l.label", 2); }),
            ErrorCategory::kFormat);
}

TEST(ReadLabels, WriteReadRoundTrip) {
  ScratchDir dir("label");
  SemanticLabels labels;
  labels.class_ids = {0, 40, 80, 50, 65535};
  WriteLabels(dir / "l.label", labels);
  EXPECT_EQ(ReadLabels(dir / "l.label", 5).class_ids, labels.class_ids);
}

TEST(ReadPoses, IdentityPoseIdentityCalibration) {
  ScratchDir dir("poses");
  testing::WriteText(dir / "calib.txt",
                     "P0: 1 0 0 0 0 1 0 0 0 0 1 0\nTr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  testing::WriteText(dir / "poses.txt", kIdentityPose);
  const auto poses = ReadPoses(dir / "poses.txt", dir / "calib.txt");
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_EQ(poses[0].frame_id, 0u);
  EXPECT_TRUE(poses[0].rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  EXPECT_EQ(poses[0].translation, Eigen::Vector3d::Zero());
}

TEST(ReadPoses, TranslationPassesThroughIdentityCalibration) {
  ScratchDir dir("poses");
  testing::WriteText(dir / "calib.txt", "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  testing::WriteText(dir / "poses.txt",
                     std::string(kIdentityPose) + "1 0 0 3.5 0 1 0 -2 0 0 1 7\n");
  const auto poses = ReadPoses(dir / "poses.txt", dir / "calib.txt");
  ASSERT_EQ(poses.size(), 2u);
  EXPECT_EQ(poses[1].frame_id, 1u);
  EXPECT_EQ(poses[1].translation, Eigen::Vector3d(3.5, -2, 7));
}

TEST(ReadPoses, ElevenNumbersRejected) {
  ScratchDir dir("poses");
  testing::WriteText(dir / "calib.txt", "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  testing::WriteText(dir / "poses.txt", "1 0 0 0 0 1 0 0 0 0 1\n");
  EXPECT_EQ(CategoryOf([&] { ReadPoses(dir / "poses.txt", dir / "calib.txt"); }),
            ErrorCategory::kFormat);
}

TEST(ReadPoses, MissingTrRejected) {
  ScratchDir dir("poses");
  testing::WriteText(dir / "calib.txt", "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  testing::WriteText(dir / "poses.txt", kIdentityPose);
  EXPECT_EQ(CategoryOf([&] { ReadPoses(dir / "poses.txt", dir / "calib.txt"); }),
            ErrorCategory::kFormat);
}

TEST(ReadPoses, CalibrationConjugatesCameraPoses) {
  // Camera frame: x right, y down, z forward. A pure forward camera motion of
  // 5 m is a LiDAR motion of +5 m along x.
  ScratchDir dir("poses");
  testing::WriteText(dir / "calib.txt", "Tr: 0 -1 0 0 0 0 -1 0 1 0 0 0\n");
  testing::WriteText(dir / "poses.txt", "1 0 0 0 0 1 0 0 0 0 1 5\n");
  const auto poses = ReadPoses(dir / "poses.txt", dir / "calib.txt");
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_TRUE(poses[0].translation.isApprox(Eigen::Vector3d(5, 0, 0), 1e-15));
}

TEST(ReadPoses, WriteReadRoundTripIsOrthonormal) {
  ScratchDir dir("poses");
  Rng rng(17);
  Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
  tr.topLeftCorner<3, 3>() =
      Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  tr.topRightCorner<3, 1>() = Eigen::Vector3d(0.1, -0.2, 0.3);
  std::vector<FramePose> poses;
  for (std::uint32_t i = 0; i < 50; ++i) {
    FramePose p;
    p.frame_id = i;
    const Eigen::Vector3d axis(UniformReal(rng, -1, 1), UniformReal(rng, -1, 1),
                               UniformReal(rng, -1, 1));
    p.rotation = Eigen::AngleAxisd(UniformReal(rng, -3, 3), axis.normalized())
                     .toRotationMatrix();
    p.translation = Eigen::Vector3d(UniformReal(rng, -500, 500),
                                    UniformReal(rng, -500, 500),
                                    UniformReal(rng, -20, 20));
    poses.push_back(p);
  }
  WriteCalibration(dir / "calib.txt", tr);
  WritePoses(dir / "poses.txt", poses, tr);
  const auto back = ReadPoses(dir / "poses.txt", dir / "calib.txt");
  ASSERT_EQ(back.size(), poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Eigen::Matrix3d& r = back[i].rotation;
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_LT((r - poses[i].rotation).norm(), 1e-9);
    EXPECT_LT((back[i].translation - poses[i].translation).norm(), 1e-9);
  }
}

TEST(OpenSequence, ListsEveryMissingComponent) {
  ScratchDir dir("seq");
  try {
    OpenSequence(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
    const std::string msg = e.what();
    for (const char* part : {"velodyne/", "labels/", "poses.txt", "calib.txt"}) {
      EXPECT_NE(msg.find(part), std::string::npos) << part;
    }
  }
}

TEST(OpenSequence, FramesSortedAndStrayFilesIgnored) {
  ScratchDir dir("seq");
  std::filesystem::create_directories(dir / "velodyne");
  std::filesystem::create_directories(dir / "labels");
  for (const char* name : {"000002.bin", "000000.bin", "000010.bin", "notes.txt",
                           "tmp.bin"}) {
    testing::WriteBytes(dir.path() / "velodyne" / name, {});
  }
  const SequenceLayout layout = OpenSequence(dir.path(), false);
  EXPECT_EQ(layout.frame_ids, (std::vector<std::uint32_t>{0, 2, 10}));
  EXPECT_EQ(layout.VelodynePath(2).filename(), "000002.bin");
  EXPECT_EQ(layout.LabelPath(10).filename(), "000010.label");
}

TEST(LoadFrame, ErrorNamesFrame) {
  ScratchDir dir("seq");
  std::filesystem::create_directories(dir / "velodyne");
  std::filesystem::create_directories(dir / "labels");
  testing::WriteBytes(dir.path() / "velodyne" / "000007.bin",
                      std::vector<unsigned char>(20, 0));
  const SequenceLayout layout = OpenSequence(dir.path(), false);
  try {
    LoadFrame(layout, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kFormat);
    EXPECT_NE(std::string(e.what()).find("000007"), std::string::npos);
  }
}

TEST(Formatting, FrameNameAndCsvNumber) {
  EXPECT_EQ(FrameName(42), "000042");
  EXPECT_EQ(FormatCsvNumber(0.5), "0.5");
  EXPECT_EQ(FormatCsvNumber(-3.0), "-3");
}

}  // namespace
}  // namespace osc
