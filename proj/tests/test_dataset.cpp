#include "covsig/dataset.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

using namespace covsig;

namespace {

class TempDir : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = std::filesystem::temp_directory_path() /
           ("covsig_dataset_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path write(const std::string& name, const std::string& body)
  {
    const auto path = dir_ / name;
    std::ofstream(path) << body;
    return path;
  }

  std::filesystem::path dir_;
};

std::string message_of(const std::function<void()>& f)
{
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

} // namespace

using LoadDataset = TempDir;

TEST_F(LoadDataset, ParsesRolesInSchemaOrder)
{
  const auto path = write("d.csv", "x1,w2,y,w1\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  const Dataset d = load_dataset(path, {"y", {"w1", "w2"}, {"x1"}, {}});
  EXPECT_EQ(d.n(), 3);
  EXPECT_EQ(d.p(), 2);
  EXPECT_EQ(d.q(), 1);
  EXPECT_EQ(d.y(1), 7.0);
  EXPECT_EQ(d.w(2, 0), 12.0);
  EXPECT_EQ(d.w(2, 1), 10.0);
  EXPECT_EQ(d.x(0, 0), 1.0);
  EXPECT_EQ(d.w_names[1], "w2");
}

TEST_F(LoadDataset, MarksDiscreteColumns)
{
  const auto path = write("d.csv", "y,w1,x1\n1,0,1\n2,1,0\n3,0.5,1\n");
  const Dataset d = load_dataset(path, {"y", {"w1"}, {"x1"}, {"x1"}});
  EXPECT_EQ(d.w_kinds[0], ColumnKind::continuous);
  EXPECT_EQ(d.x_kinds[0], ColumnKind::discrete);
  EXPECT_EQ(d.p_continuous(), 1);
  EXPECT_EQ(d.q_continuous(), 0);
}

TEST_F(LoadDataset, ToleratesSurroundingWhitespaceAndCrlf)
{
  const auto path = write("d.csv", "y , w1,x1\r\n 1, 2 ,3\r\n4,5,6\r\n\n");
  const Dataset d = load_dataset(path, {"y", {"w1"}, {"x1"}, {}});
  EXPECT_EQ(d.n(), 2);
  EXPECT_EQ(d.w(0, 0), 2.0);
}

TEST_F(LoadDataset, MissingColumnIsNamed)
{
  const auto path = write("d.csv", "y,w1,x1\n1,2,3\n");
  const auto msg = message_of([&] { load_dataset(path, {"y", {"w9"}, {"x1"}, {}}); });
  EXPECT_NE(msg.find("missing column 'w9'"), std::string::npos) << msg;
}

TEST_F(LoadDataset, NanCellIsNamed)
{
  const auto path = write("d.csv", "y,w1,x1\n1,2,3\n4,nan,6\n");
  const auto msg = message_of([&] { load_dataset(path, {"y", {"w1"}, {"x1"}, {}}); });
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'w1'"), std::string::npos) << msg;
}

TEST_F(LoadDataset, NonNumericCellIsRejected)
{
  const auto path = write("d.csv", "y,w1,x1\n1,abc,3\n");
  EXPECT_THROW(load_dataset(path, {"y", {"w1"}, {"x1"}, {}}), InvalidInput);
}

TEST_F(LoadDataset, RaggedRowIsRejected)
{
  const auto path = write("d.csv", "y,w1,x1\n1,2\n");
  EXPECT_THROW(load_dataset(path, {"y", {"w1"}, {"x1"}, {}}), InvalidInput);
}

TEST_F(LoadDataset, OverlappingRolesAreRejected)
{
  const auto path = write("d.csv", "y,w1,x1\n1,2,3\n");
  EXPECT_THROW(load_dataset(path, {"y", {"w1"}, {"w1"}, {}}), InvalidInput);
}

TEST_F(LoadDataset, SaveRoundTripsExactly)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Vector<double> y(7);
  Matrix<double> w(7, 2), x(7, 1);
  for (Index i = 0; i < 7; ++i) {
    y(i) = normal(rng);
    w(i, 0) = normal(rng) * 1e-7;
    w(i, 1) = i % 2;
    x(i, 0) = normal(rng) * 1e9;
  }
  const Dataset d = make_dataset(y, w, x, {ColumnKind::continuous, ColumnKind::discrete});
  const auto path = dir_ / "round.csv";
  save_dataset(path, d);
  const Dataset back = load_dataset(path, schema_of(d));
  EXPECT_EQ(back.y, d.y);
  EXPECT_EQ(back.w, d.w);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.w_kinds, d.w_kinds);
}

TEST(Standardize, DividesBySampleSd)
{
  Vector<double> y(3);
  y << 1, 2, 3;
  Matrix<double> w(3, 1), x(3, 1);
  w << 0, 2, 4;
  x << 1, 2, 3;
  const ScaledDataset sd = standardize(make_dataset(y, w, x));
  EXPECT_DOUBLE_EQ(sd.w_scales(0), 2.0);
  EXPECT_DOUBLE_EQ(sd.data.w(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(sd.data.w(2, 0), 2.0);
  EXPECT_EQ(sd.data.y, y);
}

TEST(Standardize, UnitSdColumnIsUnchangedAndIdempotent)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  Vector<double> y(40);
  Matrix<double> w(40, 2), x(40, 3);
  for (Index i = 0; i < 40; ++i) {
    y(i) = normal(rng);
    for (Index j = 0; j < 2; ++j) w(i, j) = 3.0 * normal(rng);
    for (Index j = 0; j < 3; ++j) x(i, j) = 0.1 * normal(rng);
  }
  const ScaledDataset once = standardize(make_dataset(y, w, x));
  const ScaledDataset twice = standardize(once.data);
  for (Index j = 0; j < 2; ++j) EXPECT_NEAR(twice.w_scales(j), 1.0, 1e-12);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(twice.x_scales(j), 1.0, 1e-12);
  EXPECT_TRUE(twice.data.w.isApprox(once.data.w, 1e-12));
}

TEST(Standardize, DiscreteColumnsAreLeftAlone)
{
  Vector<double> y(4);
  y << 1, 2, 3, 4;
  Matrix<double> w(4, 1), x(4, 1);
  w << 0, 5, 0, 5;
  x << 1, 2, 1, 2;
  const ScaledDataset sd = standardize(
    make_dataset(y, w, x, {ColumnKind::discrete}, {ColumnKind::discrete}));
  EXPECT_EQ(sd.data.w, w);
  EXPECT_EQ(sd.data.x, x);
}

TEST(Standardize, ConstantContinuousColumnIsAnError)
{
  Vector<double> y(3);
  y << 1, 2, 3;
  Matrix<double> w(3, 1), x(3, 1);
  w << 1, 1, 1;
  x << 1, 2, 3;
  const auto msg = message_of([&] { standardize(make_dataset(y, w, x)); });
  EXPECT_NE(msg.find("zero variance"), std::string::npos) << msg;
}

TEST(DatasetValidate, RejectsShapeMismatchAndSmallN)
{
  Dataset d = make_dataset(Vector<double>::Ones(4), Matrix<double>::Ones(4, 1),
                           Matrix<double>::Ones(4, 1));
  EXPECT_THROW(d.validate(5), InvalidInput);
  d.x.resize(3, 1);
  EXPECT_THROW(d.validate(), InvalidInput);
}
