// Field-campaign sample fixtures mirrored from the simulator's bundled
// dataset (24 syringes across 8 motor groups).

import { SampleRecord } from "../src/types.js";

export const FIELD_RECORDS: SampleRecord[] = [
  {
    "mission": "lagoon-field-trial",
    "label": "A3_S1",
    "volume_ml": 0,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6001,
    "lon": -68.1501,
    "temperature_c": null,
    "ph": null,
    "tds_mg_l": null,
    "ec_us_cm": null
  },
  {
    "mission": "lagoon-field-trial",
    "label": "A3_S2",
    "volume_ml": 39,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6001,
    "lon": -68.1501,
    "temperature_c": 10.6,
    "ph": 7.86,
    "tds_mg_l": 0.2,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "A3_S3",
    "volume_ml": 42,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6001,
    "lon": -68.1501,
    "temperature_c": 10.1,
    "ph": 7.41,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.43
  },
  {
    "mission": "lagoon-field-trial",
    "label": "A4_S1",
    "volume_ml": 37,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6003,
    "lon": -68.1496,
    "temperature_c": 10.1,
    "ph": 7.64,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "A4_S2",
    "volume_ml": 29,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6003,
    "lon": -68.1496,
    "temperature_c": 10.5,
    "ph": 8.1,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.43
  },
  {
    "mission": "lagoon-field-trial",
    "label": "A4_S3",
    "volume_ml": 33,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6003,
    "lon": -68.1496,
    "temperature_c": 10.2,
    "ph": 7.9,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B2_S1",
    "volume_ml": 41,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6006,
    "lon": -68.1492,
    "temperature_c": 8.8,
    "ph": 7.48,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.4
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B2_S2",
    "volume_ml": 41,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6006,
    "lon": -68.1492,
    "temperature_c": 8.7,
    "ph": 7.42,
    "tds_mg_l": 0.2,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B2_S3",
    "volume_ml": 36,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6006,
    "lon": -68.1492,
    "temperature_c": 8.4,
    "ph": 8.36,
    "tds_mg_l": 0.22,
    "ec_us_cm": 0.47
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B3_S1",
    "volume_ml": 42,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.601,
    "lon": -68.1489,
    "temperature_c": 9.4,
    "ph": 7.67,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B3_S2",
    "volume_ml": 38,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.601,
    "lon": -68.1489,
    "temperature_c": 9.3,
    "ph": 7.58,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B3_S3",
    "volume_ml": 38,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.601,
    "lon": -68.1489,
    "temperature_c": 9.4,
    "ph": 7.39,
    "tds_mg_l": 0.2,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B4_S1",
    "volume_ml": 33,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6014,
    "lon": -68.1493,
    "temperature_c": 8.9,
    "ph": 7.46,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B4_S2",
    "volume_ml": 34,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6014,
    "lon": -68.1493,
    "temperature_c": 9.1,
    "ph": 7.41,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "B4_S3",
    "volume_ml": 38,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6014,
    "lon": -68.1493,
    "temperature_c": 9.2,
    "ph": 7.42,
    "tds_mg_l": 0.2,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D2_S1",
    "volume_ml": 36,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6018,
    "lon": -68.1499,
    "temperature_c": 7.5,
    "ph": 7.57,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D2_S2",
    "volume_ml": 24,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6018,
    "lon": -68.1499,
    "temperature_c": 7.5,
    "ph": 7.48,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D2_S3",
    "volume_ml": 34,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6018,
    "lon": -68.1499,
    "temperature_c": 7.6,
    "ph": 7.47,
    "tds_mg_l": 0.22,
    "ec_us_cm": 0.43
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D3_S1",
    "volume_ml": 37,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6015,
    "lon": -68.1505,
    "temperature_c": 7.9,
    "ph": 7.87,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D3_S2",
    "volume_ml": 38,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6015,
    "lon": -68.1505,
    "temperature_c": 7.9,
    "ph": 7.62,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.41
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D3_S3",
    "volume_ml": 36,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6015,
    "lon": -68.1505,
    "temperature_c": 7.6,
    "ph": 7.55,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D4_S1",
    "volume_ml": 40,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6011,
    "lon": -68.1509,
    "temperature_c": 8.1,
    "ph": 7.67,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.43
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D4_S2",
    "volume_ml": 40,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6011,
    "lon": -68.1509,
    "temperature_c": 7.9,
    "ph": 7.49,
    "tds_mg_l": 0.21,
    "ec_us_cm": 0.42
  },
  {
    "mission": "lagoon-field-trial",
    "label": "D4_S3",
    "volume_ml": 40,
    "t_start": 0.0,
    "t_end": 1.0,
    "lat": -16.6011,
    "lon": -68.1509,
    "temperature_c": 7.9,
    "ph": 7.44,
    "tds_mg_l": 0.22,
    "ec_us_cm": 0.43
  }
];

// per-waypoint pH means over present readings (the heatmap convention)
export const GROUP_PH: Record<string, { lat: number; lon: number; ph_mean: number; ph_count: number }> = {
  "A3": {
    "lat": -16.6001,
    "lon": -68.1501,
    "ph_mean": 7.635,
    "ph_count": 2
  },
  "A4": {
    "lat": -16.6003,
    "lon": -68.1496,
    "ph_mean": 7.88,
    "ph_count": 3
  },
  "B2": {
    "lat": -16.6006,
    "lon": -68.1492,
    "ph_mean": 7.753333,
    "ph_count": 3
  },
  "B3": {
    "lat": -16.601,
    "lon": -68.1489,
    "ph_mean": 7.546667,
    "ph_count": 3
  },
  "B4": {
    "lat": -16.6014,
    "lon": -68.1493,
    "ph_mean": 7.43,
    "ph_count": 3
  },
  "D2": {
    "lat": -16.6018,
    "lon": -68.1499,
    "ph_mean": 7.506667,
    "ph_count": 3
  },
  "D3": {
    "lat": -16.6015,
    "lon": -68.1505,
    "ph_mean": 7.68,
    "ph_count": 3
  },
  "D4": {
    "lat": -16.6011,
    "lon": -68.1509,
    "ph_mean": 7.533333,
    "ph_count": 3
  }
};
