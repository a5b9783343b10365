/*
 * Copyright 2026 The causalcam Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "causalcam/dataset.h"

#include <filesystem>
#include <string>

#include "causalcam/error.h"
#include "causalcam/image.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"

namespace causalcam {
namespace {

namespace fs = std::filesystem;

TEST(GenerateTest, SplitSizesAndBalance) {
  const DatasetSplit split = Generate({100, 64, 1, 0.9});
  EXPECT_EQ(split.train.size(), 80u);
  EXPECT_EQ(split.test.size(), 20u);
  int per_class[2] = {0, 0};
  for (const auto* images : {&split.train, &split.test}) {
    for (const LabeledImage& item : *images) {
      ++per_class[item.label];
      EXPECT_EQ(item.image.height, 64);
      EXPECT_EQ(item.image.width, 64);
    }
  }
  EXPECT_EQ(per_class[0], 50);
  EXPECT_EQ(per_class[1], 50);
  EXPECT_EQ(split.generator_version, kGeneratorVersion);
}

TEST(GenerateTest, TestSplitIsTwentyPercentRoundedToEven) {
  EXPECT_EQ(TestSplitSize(100), 20);
  EXPECT_EQ(TestSplitSize(800), 160);
  EXPECT_EQ(TestSplitSize(10), 2);
  EXPECT_EQ(TestSplitSize(14), 2);
  EXPECT_EQ(TestSplitSize(16), 4);
}

TEST(GenerateTest, Deterministic) {
  const DatasetSplit a = Generate({40, 32, 5, 0.9});
  const DatasetSplit b = Generate({40, 32, 5, 0.9});
  ASSERT_EQ(a.train.size(), b.train.size());
  for (size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train[i].image, b.train[i].image);
  }
  EXPECT_EQ(DatasetDigest(a), DatasetDigest(b));
}

TEST(GenerateTest, SeedSensitivity) {
  const DatasetSplit a = Generate({20, 32, 1, 0.9});
  const DatasetSplit b = Generate({20, 32, 2, 0.9});
  bool differs = false;
  for (size_t i = 0; i < a.train.size(); ++i) {
    differs |= a.train[i].image != b.train[i].image;
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(DatasetDigest(a), DatasetDigest(b));
}

TEST(GenerateTest, ImagesDoNotDependOnSplitPosition) {
  // Image j comes from its own stream, so a larger draw extends a smaller one.
  const DatasetSplit small = Generate({20, 32, 3, 0.9});
  const DatasetSplit large = Generate({40, 32, 3, 0.9});
  for (size_t i = 0; i < small.train.size(); ++i) {
    EXPECT_EQ(small.train[i].image, large.train[i].image);
  }
}

TEST(GenerateTest, PixelsInUnitRange) {
  const DatasetSplit split = Generate({40, 64, 8, 0.9});
  for (const LabeledImage& item : split.train) {
    for (float v : item.image.pixels) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
}

TEST(GenerateTest, CheckerMarksExactlyTheCausalClass) {
  const DatasetSplit split = Generate({200, 64, 1, 0.9});
  const Box inner{kPatchMargin, kPatchMargin, 64 - 2 * kPatchMargin,
                  64 - 2 * kPatchMargin};
  for (const auto* images : {&split.train, &split.test}) {
    for (const LabeledImage& item : *images) {
      if (item.label == 1) {
        ASSERT_TRUE(item.causal_box.has_value());
        EXPECT_TRUE(inner.Contains(*item.causal_box));
        const Box& box = *item.causal_box;
        for (int r = 0; r < kCheckerSize; ++r) {
          for (int c = 0; c < kCheckerSize; ++c) {
            ASSERT_EQ(item.image.at(box.row + r, box.col + c),
                      CheckerPattern()[r * kCheckerSize + c]);
          }
        }
        EXPECT_TRUE(ContainsChecker(item.image));
      } else {
        EXPECT_FALSE(item.causal_box.has_value());
        EXPECT_FALSE(ContainsChecker(item.image));
      }
    }
  }
}

TEST(GenerateTest, ContextAgreementMatchesCorrelation) {
  for (double corr : {0.9, 0.7}) {
    const DatasetSplit split = Generate({10000, 32, 11, corr});
    int agree = 0;
    int total = 0;
    for (const auto* images : {&split.train, &split.test}) {
      for (const LabeledImage& item : *images) {
        ASSERT_TRUE(item.context_present.has_value());
        agree += *item.context_present == (item.label == 1);
        ++total;
      }
    }
    EXPECT_EQ(total, 10000);
    EXPECT_NEAR(static_cast<double>(agree) / total, corr, 0.02);
  }
}

TEST(GenerateTest, RejectsBadConfiguration) {
  const std::vector<GeneratorConfig> bad = {
      {0, 64, 1, 0.9},   {7, 64, 1, 0.9},   {100, 16, 1, 0.9},
      {100, 64, 1, 0.4}, {100, 64, 1, 1.1}, {2, 64, 1, 0.9}};
  for (const GeneratorConfig& config : bad) {
    try {
      Generate(config);
      ADD_FAILURE() << config.n << " " << config.size << " "
                    << config.context_correlation;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
    }
  }
}

TEST(BoxTest, Containment) {
  const Box outer{0, 0, 10, 10};
  EXPECT_TRUE(outer.Contains({2, 2, 8, 8}));
  EXPECT_FALSE(outer.Contains({3, 3, 8, 8}));
  EXPECT_TRUE(outer.Contains(outer));
}

void WritePgmFile(const fs::path& file, int size, char byte) {
  fs::create_directories(file.parent_path());
  testing::WriteFile(file.string(), "P5\n" + std::to_string(size) + " " +
                                        std::to_string(size) + "\n255\n" +
                                        std::string(size * size, byte));
}

TEST(LoadFolderTest, CountsOneFilePerFolder) {
  testing::TempDir dir("load");
  for (const char* split : {"train", "test"}) {
    for (const char* label : {"0", "1"}) {
      WritePgmFile(dir.path() / split / label / "a.pgm", 64, '\xff');
    }
  }
  const DatasetSplit split = LoadFolder(dir.path().string());
  ASSERT_EQ(split.train.size(), 2u);
  ASSERT_EQ(split.test.size(), 2u);
  EXPECT_EQ(split.train[0].label, 0);
  EXPECT_EQ(split.train[1].label, 1);
  for (float v : split.train[0].image.pixels) ASSERT_EQ(v, 1.0f);
}

TEST(LoadFolderTest, SortsByFileName) {
  testing::TempDir dir("sort");
  WritePgmFile(dir.path() / "train/0/b.pgm", 32, '\x02');
  WritePgmFile(dir.path() / "train/0/a.pgm", 32, '\x01');
  WritePgmFile(dir.path() / "train/1/c.pgm", 32, '\x03');
  WritePgmFile(dir.path() / "test/0/d.pgm", 32, '\x04');
  WritePgmFile(dir.path() / "test/1/e.pgm", 32, '\x05');
  const DatasetSplit split = LoadFolder(dir.path().string());
  ASSERT_EQ(split.train.size(), 3u);
  EXPECT_EQ(split.train[0].image.pixels[0], 1.0f / 255.0f);
  EXPECT_EQ(split.train[1].image.pixels[0], 2.0f / 255.0f);
  EXPECT_EQ(split.train[2].label, 1);
}

TEST(LoadFolderTest, CorruptMagicNamesTheFile) {
  testing::TempDir dir("magic");
  for (const char* split : {"train", "test"}) {
    for (const char* label : {"0", "1"}) {
      WritePgmFile(dir.path() / split / label / "ok.pgm", 32, '\x10');
    }
  }
  testing::WriteFile((dir.path() / "train/1/bad.pgm").string(),
                     "P6\n32 32\n255\n" + std::string(32 * 32 * 3, 'x'));
  try {
    LoadFolder(dir.path().string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLoad);
    EXPECT_NE(std::string(e.what()).find("bad.pgm"), std::string::npos)
        << e.what();
  }
}

TEST(LoadFolderTest, MissingFolderIsALoadError) {
  testing::TempDir dir("missing");
  WritePgmFile(dir.path() / "train/0/a.pgm", 32, '\x10');
  try {
    LoadFolder(dir.path().string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLoad);
    EXPECT_NE(std::string(e.what()).find("train/1"), std::string::npos)
        << e.what();
  }
}

TEST(LoadFolderTest, RaggedSizesAreRejected) {
  testing::TempDir dir("ragged");
  WritePgmFile(dir.path() / "train/0/a.pgm", 32, '\x10');
  WritePgmFile(dir.path() / "train/1/b.pgm", 40, '\x10');
  WritePgmFile(dir.path() / "test/0/c.pgm", 32, '\x10');
  WritePgmFile(dir.path() / "test/1/d.pgm", 32, '\x10');
  try {
    LoadFolder(dir.path().string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLoad);
    EXPECT_NE(std::string(e.what()).find("b.pgm"), std::string::npos);
  }
}

TEST(LoadFolderTest, ExportThenLoadPreservesQuantizedImages) {
  testing::TempDir dir("export");
  const DatasetSplit split = Generate({20, 32, 4, 0.9});
  ExportFolder(split, dir.path().string());
  const DatasetSplit back = LoadFolder(dir.path().string());
  ASSERT_EQ(back.train.size(), split.train.size());
  ASSERT_EQ(back.test.size(), split.test.size());
  // Export groups by label, so compare per class in original order.
  for (int label = 0; label < 2; ++label) {
    std::vector<const LabeledImage*> original;
    std::vector<const LabeledImage*> loaded;
    for (const auto& item : split.train) {
      if (item.label == label) original.push_back(&item);
    }
    for (const auto& item : back.train) {
      if (item.label == label) loaded.push_back(&item);
    }
    ASSERT_EQ(original.size(), loaded.size());
    for (size_t i = 0; i < original.size(); ++i) {
      for (int p = 0; p < original[i]->image.size(); ++p) {
        ASSERT_NEAR(loaded[i]->image.pixels[p], original[i]->image.pixels[p],
                    0.5 / 255 + 1e-7);
      }
    }
  }
}

}  // namespace
}  // namespace causalcam
