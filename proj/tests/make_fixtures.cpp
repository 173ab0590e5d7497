// Copyright 2026 The AMSS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes a synthetic masker bank, a 600 s ambient recording and a
// calibration table for the CLI end-to-end test.
//
//   amss_fixtures <dir>

#include <iostream>

#include "amss.hpp"
#include "test_support.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: amss_fixtures <dir>\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  const double fs = 32000.0;
  amss::testing::WriteBank(dir / "bank", fs, 30.0);
  const amss::Waveform ambient = amss::testing::SyntheticAmbient(fs, 600.0, 65.0, 3);
  amss::WriteWav(dir / "ambient.wav", amss::AudioFile{fs, {ambient.samples}});
  amss::WriteFileAtomic(dir / "calib.csv",
                        amss::testing::CalibrationCsv(amss::SyntheticCalibration("check")));
  amss::WriteFileAtomic(dir / "bad_survey.csv", "participant_id,site\nP1,GFP\n");
  return 0;
}
