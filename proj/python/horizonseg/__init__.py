# Copyright 2026 The horizonseg Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Seismic horizon detection as volumetric binary segmentation."""

from ._core import (
    ConfigError,
    Cube,
    FormatError,
    Geometry,
    Horizon,
    HsegError,
    IoError,
    NumericError,
    OverlapError,
    RangeError,
    TrainedModel,
    compare_horizons,
    dice_loss,
    extract_horizons,
    ibm_to_ieee,
    ieee_to_ibm,
    ingest_segy,
    load_horizon,
    load_native,
    match_horizons,
    rasterize_mask,
    run_cli,
    save_horizon,
    save_native,
    synthesize,
    train,
    write_segy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
