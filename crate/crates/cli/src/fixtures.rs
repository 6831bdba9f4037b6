//! Deterministic media fixtures and the example script that queries them.
//!
//! [`generate`] writes four relations as data files, the images they
//! reference, a few query images and `section6.simseql`, which loads the
//! data, attaches indexes and runs the seven example queries. The same seed
//! always produces byte-identical files.
//!
//! Images are small rasters of one bright figure on a dark background, in
//! five colour themes. Their colour and shape descriptors come from the
//! built-in extractors, so extracting from a stored image reproduces the
//! stored vectors. A few things are planted so every query has a
//! non-trivial answer: two faces that co-occur in exactly one video, a
//! video whose frames both look like the volcano query image and mention
//! "vulcano" in their subtitles, and theme keywords shared by images of
//! similar colour.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simseql_core::datamodel::ImageRaster;
use simseql_core::functions::extractors::{color_layout, contour_shape};
use simseql_core::Value;

use crate::error::{CliError, Result};
use crate::tsv::{format_cell, IMAGE_PREFIX};

pub const DEFAULT_SEED: u64 = 6;
pub const SCRIPT_NAME: &str = "section6.simseql";
pub const DATA_DIR: &str = "section6";
pub const IMAGES: usize = 100;
pub const VIDEOS: usize = 10;
pub const FRAMES_PER_VIDEO: usize = 20;
pub const TAGS_PER_IMAGE: usize = 3;
const SIDE: u32 = 16;
const FACE_DIM: usize = 4;

#[derive(Clone, Copy)]
enum Figure {
    Cone,
    Band,
    Disk,
    Ellipse,
    Block,
}

struct Theme {
    background: [u8; 3],
    foreground: [u8; 3],
    figure: Figure,
    title_words: [&'static str; 4],
    keywords: [&'static str; 4],
    places: [&'static str; 3],
}

const THEMES: [Theme; 5] = [
    Theme {
        background: [90, 30, 20],
        foreground: [250, 140, 40],
        figure: Figure::Cone,
        title_words: ["Vesuvius", "crater", "lava", "eruption"],
        keywords: ["volcano", "lava", "crater", "eruption"],
        places: ["Naples", "Pompeii", "Catania"],
    },
    Theme {
        background: [20, 40, 110],
        foreground: [230, 210, 150],
        figure: Figure::Band,
        title_words: ["harbour", "beach", "waves", "sail"],
        keywords: ["sea", "beach", "wave", "sand"],
        places: ["Amalfi", "Sorrento", "Bari"],
    },
    Theme {
        background: [20, 70, 30],
        foreground: [150, 220, 120],
        figure: Figure::Disk,
        title_words: ["forest", "pines", "trail", "moss"],
        keywords: ["forest", "tree", "moss", "fern"],
        places: ["Trento", "Bolzano", "Sila"],
    },
    Theme {
        background: [80, 80, 90],
        foreground: [250, 250, 250],
        figure: Figure::Ellipse,
        title_words: ["glacier", "snowfield", "peak", "frost"],
        keywords: ["snow", "ice", "glacier", "winter"],
        places: ["Cervinia", "Courmayeur", "Livigno"],
    },
    Theme {
        background: [40, 40, 40],
        foreground: [240, 220, 90],
        figure: Figure::Block,
        title_words: ["skyline", "street", "tower", "lights"],
        keywords: ["city", "street", "tower", "night"],
        places: ["Milan", "Rome", "Turin"],
    },
];

const VOLCANO: usize = 0;
const SEA: usize = 1;
const CITY: usize = 4;

/// Keywords outside the themes, with near-duplicates for the edit distances.
const OTHER_KEYWORDS: [&str; 30] = [
    "feather", "faether", "fether", "feathers", "leather", "heather", "weather", "dog", "dot", "cat", "cut", "cart",
    "card", "bird", "wing", "wind", "fish", "dish", "sun", "son", "rain", "train", "mountain", "fountain", "lake",
    "late", "bridge", "boat", "coat", "goat",
];

const TITLE_ENDINGS: [&str; 8] = [
    "at dawn", "at dusk", "panorama", "close-up", "in winter", "in summer", "from above", "by night",
];

const SUBTITLES: [&str; 12] = [
    "the weather report for the weekend",
    "the news at the top of the hour",
    "an interview with the mayor",
    "the traffic on the ring road",
    "the market opens higher",
    "a walk through the old town",
    "the match ends in a draw",
    "music from the festival",
    "the ferry leaves the harbour",
    "rain expected in the north",
    "the museum reopens today",
    "a recipe from the coast",
];

/// Video, frames and offsets of planted query answers.
const OBAMA_FRAMES: [(usize, usize); 6] = [(1, 3), (1, 4), (1, 5), (3, 6), (3, 7), (3, 8)];
const BUSH_FRAMES: [(usize, usize); 4] = [(3, 12), (3, 13), (6, 1), (6, 2)];
const VESUV_VIDEO: usize = 8;

fn jitter(rng: &mut ChaCha8Rng, c: [u8; 3], amount: i32) -> [u8; 3] {
    c.map(|v| (i32::from(v) + rng.gen_range(-amount..=amount)).clamp(0, 255) as u8)
}

fn raster(theme: &Theme, rng: &mut ChaCha8Rng) -> ImageRaster {
    let cx = 8.0 + rng.gen_range(-2.5..2.5);
    let cy = 8.0 + rng.gen_range(-2.5..2.5);
    let s = rng.gen_range(3.0..6.5);
    let stretch = rng.gen_range(0.6..1.4);
    let figure = theme.figure;
    let inside = move |x: u32, y: u32| {
        let (dx, dy) = ((f64::from(x) + 0.5 - cx) / stretch, f64::from(y) + 0.5 - cy);
        match figure {
            Figure::Cone => dy.abs() <= s && dx.abs() <= (dy + s) / 2.0,
            Figure::Band => dy.abs() <= s / 2.0,
            Figure::Disk => dx * dx + dy * dy <= s * s,
            Figure::Ellipse => (dx / (1.8 * s)).powi(2) + (dy / (0.8 * s)).powi(2) <= 1.0,
            Figure::Block => dx.abs() <= s && dy.abs() <= s / 2.0,
        }
    };
    let mut pixels = Vec::with_capacity((SIDE * SIDE) as usize);
    for y in 0..SIDE {
        for x in 0..SIDE {
            let base = if inside(x, y) { theme.foreground } else { theme.background };
            pixels.push(jitter(rng, base, 12));
        }
    }
    ImageRaster::from_fn(SIDE, SIDE, |x, y| pixels[(y * SIDE + x) as usize])
}

fn perturbed(img: &ImageRaster, rng: &mut ChaCha8Rng, amount: i32) -> ImageRaster {
    ImageRaster::from_fn(img.width(), img.height(), |x, y| jitter(rng, img.pixel(x, y), amount))
}

fn descriptors(img: &ImageRaster) -> (Vec<f64>, Vec<f64>) {
    (
        color_layout(img).expect("fixture rasters are non-empty"),
        contour_shape(img).expect("fixture rasters are non-empty"),
    )
}

fn round(v: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (v * f).round() / f
}

fn vector_literal(v: &[f64]) -> String {
    format_cell(&Value::vector(v.to_vec()), true)
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Rows of a data file under construction.
struct Table {
    lines: Vec<String>,
}

impl Table {
    fn new(columns: &[(&str, &str)]) -> Self {
        let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
        let types: Vec<&str> = columns.iter().map(|c| c.1).collect();
        Table {
            lines: vec![names.join("\t"), types.join("\t")],
        }
    }

    fn push(&mut self, cells: Vec<String>) {
        self.lines.push(cells.join("\t"));
    }

    fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

struct Writer {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

/// Query objects chosen while generating, spelled into the script.
struct QueryObjects {
    query_shape: Vec<f64>,
    query_color: Vec<f64>,
    obama: Vec<f64>,
    bush: Vec<f64>,
}

/// Writes the fixture files under `root` and returns their paths.
pub fn generate(root: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer {
        root: root.to_path_buf(),
        written: Vec::new(),
    };
    let first_day = Value::parse_date("2004-01-01")?;

    // Keywords: the theme keywords first, then the others.
    let keywords: Vec<&str> = THEMES
        .iter()
        .flat_map(|t| t.keywords)
        .chain(OTHER_KEYWORDS)
        .collect();
    let mut table = Table::new(&[("id", "integer"), ("value", "string")]);
    for (i, k) in keywords.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), k.to_string()]);
    }
    w.write(&format!("{DATA_DIR}/keyword.tsv"), table.text().as_bytes())?;

    // Images and their tags.
    let mut images = Table::new(&[
        ("id", "integer"),
        ("image", "binary_image"),
        ("color", "number_vector"),
        ("shape", "number_vector"),
        ("title", "string"),
        ("location", "string"),
        ("date", "date"),
    ]);
    let mut tags = Table::new(&[("image_id", "integer"), ("keyword_id", "integer")]);
    let mut rasters = Vec::with_capacity(IMAGES);
    let mut shapes = Vec::with_capacity(IMAGES);
    for i in 0..IMAGES {
        let t = i % THEMES.len();
        let theme = &THEMES[t];
        let img = raster(theme, &mut rng);
        let (color, shape) = descriptors(&img);
        let file = format!("images/image_{:03}.ppm", i + 1);
        w.write(&format!("{DATA_DIR}/{file}"), &img.to_ppm())?;
        let words: Vec<&str> = theme.title_words.choose_multiple(&mut rng, 2).copied().collect();
        let title = format!("{} {} {}", words[0], words[1], TITLE_ENDINGS.choose(&mut rng).unwrap());
        let place = theme.places.choose(&mut rng).unwrap();
        let date = first_day + rng.gen_range(0..2000);
        images.push(vec![
            (i + 1).to_string(),
            format!("{IMAGE_PREFIX}{file}"),
            vector_literal(&color),
            vector_literal(&shape),
            title,
            place.to_string(),
            Value::format_date(date),
        ]);
        let mut ids: Vec<usize> = (0..4).collect::<Vec<_>>().choose_multiple(&mut rng, TAGS_PER_IMAGE - 1).map(|k| t * 4 + k + 1).collect();
        ids.push(20 + rng.gen_range(0..OTHER_KEYWORDS.len()) + 1);
        ids.sort_unstable();
        for k in ids {
            tags.push(vec![(i + 1).to_string(), k.to_string()]);
        }
        rasters.push(img);
        shapes.push(shape);
    }
    w.write(&format!("{DATA_DIR}/image.tsv"), images.text().as_bytes())?;
    w.write(&format!("{DATA_DIR}/image_keyword.tsv"), tags.text().as_bytes())?;

    // Query images and vectors.
    let target = rng.gen_range(0..IMAGES);
    let o1 = perturbed(&rasters[target], &mut rng, 4);
    let o2 = raster(&THEMES[SEA], &mut rng);
    let o3 = raster(&THEMES[CITY], &mut rng);
    let vesuv = raster(&THEMES[VOLCANO], &mut rng);
    for (name, img) in [("o1", &o1), ("o2", &o2), ("o3", &o3), ("vesuvius", &vesuv)] {
        w.write(&format!("{DATA_DIR}/query/{name}.ppm"), &img.to_ppm())?;
    }
    let probe = rng.gen_range(0..IMAGES);
    let query_shape = shapes[probe]
        .iter()
        .map(|v| round((v + rng.gen_range(-0.02..0.02)).max(0.0), 3))
        .collect();
    let query_color = color_layout(&raster(&THEMES[VOLCANO], &mut rng))?
        .into_iter()
        .map(|v| round(v, 1))
        .collect();
    let face = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..FACE_DIM).map(|_| round(rng.gen_range(0.0..1.0), 3)).collect() };
    let obama = face(&mut rng);
    let mut bush = face(&mut rng);
    while l2(&obama, &bush) < 0.5 {
        bush = face(&mut rng);
    }

    // Video frames.
    let (vesuv_color, vesuv_shape) = descriptors(&vesuv);
    let mut frames = Table::new(&[
        ("id", "integer"),
        ("video_id", "integer"),
        ("face_descriptor", "number_vector"),
        ("subtitles", "string"),
        ("time_second", "long"),
        ("color", "number_vector"),
        ("shape", "number_vector"),
    ]);
    for v in 0..VIDEOS {
        let theme = &THEMES[v % THEMES.len()];
        for f in 0..FRAMES_PER_VIDEO {
            let planted_face = if OBAMA_FRAMES.contains(&(v, f)) {
                Some(&obama)
            } else if BUSH_FRAMES.contains(&(v, f)) {
                Some(&bush)
            } else {
                None
            };
            let face_descriptor: Vec<f64> = match planted_face {
                Some(p) => p.iter().map(|x| round(x + rng.gen_range(-0.002..0.002), 4)).collect(),
                None => loop {
                    let candidate = face(&mut rng);
                    if l2(&candidate, &obama) > 0.05 && l2(&candidate, &bush) > 0.05 {
                        break candidate;
                    }
                },
            };
            let (mut color, shape) = descriptors(&raster(theme, &mut rng));
            let mut subtitles = SUBTITLES.choose(&mut rng).unwrap().to_string();
            let mut shape = shape;
            if v == VESUV_VIDEO {
                match f {
                    4..=7 => {
                        color = vesuv_color.clone();
                        shape = vesuv_shape.clone();
                    }
                    8 => {
                        color = vesuv_color.iter().map(|c| c + rng.gen_range(-3.0..3.0)).collect();
                        shape = vesuv_shape.clone();
                    }
                    _ => {}
                }
                if f == 7 {
                    for c in &mut color {
                        *c = round(*c + rng.gen_range(-0.1..0.1), 3);
                    }
                }
                subtitles = match f {
                    4 | 8 => "the vulcano".into(),
                    5 | 7 => "vulcano".into(),
                    6 => "smoke over the bay".into(),
                    _ => subtitles,
                };
            }
            if (v, f) == (2, 2) {
                subtitles = "vulcano".into();
            }
            frames.push(vec![
                (v * FRAMES_PER_VIDEO + f + 1).to_string(),
                (v + 1).to_string(),
                vector_literal(&face_descriptor),
                subtitles,
                (f as i64 * 30 + rng.gen_range(0..10)).to_string(),
                vector_literal(&color),
                vector_literal(&shape),
            ]);
        }
    }
    w.write(&format!("{DATA_DIR}/video_frame.tsv"), frames.text().as_bytes())?;

    let objects = QueryObjects {
        query_shape,
        query_color,
        obama,
        bush,
    };
    w.write(SCRIPT_NAME, script(&objects).as_bytes())?;
    Ok(w.written)
}

fn script(q: &QueryObjects) -> String {
    format!(
        r"-- Media collection: images, video frames, keywords and image tags.
-- Regenerate with: simseql --generate-fixtures <dir> --seed {DEFAULT_SEED}

\output tsv

CREATE RELATION image (
    id integer DISTANCE identity_distance,
    image binary_image DISTANCE identity_distance,
    color number_vector DISTANCE mpeg7_color_layout_metric ALSO L1_metric,
    shape number_vector DISTANCE mpeg7_contour_shape_metric ALSO L2_metric,
    title string DISTANCE tf_idf,
    location string DISTANCE simple_edit_distance,
    date date DISTANCE L1_metric
);

CREATE RELATION video_frame (
    id integer DISTANCE identity_distance,
    video_id integer DISTANCE identity_distance,
    face_descriptor number_vector DISTANCE mpeg7_face_metric,
    subtitles string DISTANCE tf_idf,
    time_second long DISTANCE L1_metric,
    color number_vector DISTANCE mpeg7_color_layout_metric,
    shape number_vector DISTANCE mpeg7_contour_shape_metric
);

CREATE RELATION keyword (
    id integer DISTANCE identity_distance,
    value string DISTANCE simple_edit_distance ALSO weighted_edit_distance
);

CREATE RELATION image_keyword (
    image_id integer DISTANCE identity_distance,
    keyword_id integer DISTANCE identity_distance
);

LOAD image FROM '{DATA_DIR}/image.tsv';
LOAD video_frame FROM '{DATA_DIR}/video_frame.tsv';
LOAD keyword FROM '{DATA_DIR}/keyword.tsv';
LOAD image_keyword FROM '{DATA_DIR}/image_keyword.tsv';

CREATE INDEX ON image(shape) USING metric;
CREATE INDEX ON image(color) USING metric WITH DISTANCE L1_metric;
CREATE INDEX keyword_value_weighted ON keyword(value) USING metric
    WITH DISTANCE weighted_edit_distance(1, 2, 2);
CREATE INDEX ON keyword(value) USING metric;
CREATE INDEX ON video_frame(face_descriptor) USING metric;
CREATE INDEX ON image_keyword(image_id) USING ordered;

\set :queryImage vector:{shape}
\set :Image vector:{color}
\set :o1 ppm:{DATA_DIR}/query/o1.ppm
\set :o2 ppm:{DATA_DIR}/query/o2.ppm
\set :o3 ppm:{DATA_DIR}/query/o3.ppm
\set :VesuvImage ppm:{DATA_DIR}/query/vesuvius.ppm
\set :ObamaFace vector:{obama}
\set :BushFace vector:{bush}

-- The 30 images whose contour is most similar to a shape descriptor.
EXPLAIN
SELECT TOP 30 id, distance
FROM SIMSEARCH :queryImage IN image BY shape;

SELECT TOP 30 id, distance
FROM SIMSEARCH :queryImage IN image BY shape;

-- Keywords within a weighted edit distance of 2 from 'feather'.
EXPLAIN
SELECT value
FROM SIMSEARCH 'feather' IN keyword BY value
     DISTANCE FUNCTION weighted_edit_distance(1,2,2)
WHERE distance <= 2;

SELECT value
FROM SIMSEARCH 'feather' IN keyword BY value
     DISTANCE FUNCTION weighted_edit_distance(1,2,2)
WHERE distance <= 2;

-- Pairs of keywords at most one edit apart.
SELECT *
FROM SIMSEARCH
     IN keyword AS k1, keyword AS k2
     BY simple_edit_distance(k1.value, k2.value)
     METHOD MessifSimilarityJoin(1);

-- The image closest to any of three example images.
SELECT TOP 1 title
FROM SIMSEARCH
       extract_MPEG7_color_layout(:o1) AS co1,
       extract_MPEG7_color_layout(:o2) AS co2,
       extract_MPEG7_contour_shape(:o3) AS sh3
     IN image
     BY minimum(DISTANCE(co1, color), DISTANCE(co2, color),
       DISTANCE(sh3,shape));

-- Videos in which both faces appear.
SELECT DISTINCT vf1.video_id
FROM SIMSEARCH :ObamaFace IN video_frame AS vf1 BY face_descriptor
       METHOD rangeQuery(0.01)
     INNER JOIN
     SIMSEARCH :BushFace IN video_frame AS vf2 BY face_descriptor
       METHOD rangeQuery(0.01)
     ON (vf1.video_id = vf2.video_id);

-- Frames that look like the volcano image and mention it in the subtitles.
SELECT vf1.video_id
FROM SIMSEARCH IN
       SIMSEARCH
         extract_MPEG7_color_layout(:VesuvImage) AS co,
         extract_MPEG7_contour_shape(:VesuvImage) AS sh
       IN video_frame AS vf1
         BY weight_sum((DISTANCE(shape,sh), 0.7),
                       (DISTANCE(color, co), 0.2))
         METHOD MessifRangeQuery(0.1,15000)
       NATURAL JOIN
       SIMSEARCH 'vulcano' IN video_frame AS vf2
         BY subtitles
         METHOD MessifRangeQuery(0.1,15000)
     BY DISTANCE(vf1.time_second, vf2.time_second)
     AS sim_frames
WHERE sim_frames.distance <= 120;

-- Keywords frequent among the 30 images closest in colour.
SELECT value
FROM keyword
WHERE id IN (
   SELECT TOP 10 keyword_id, count(image_id) AS frequency
   FROM (
       SELECT TOP 30 id
       FROM SIMSEARCH :Image IN image
            BY color DISTANCE
            FUNCTION L1_metric
   ) AS simimage
   INNER JOIN image_keyword
       ON (simimage.id = image_keyword.image_id)
   GROUP BY keyword_id
   HAVING frequency > 3
   ORDER BY frequency DESC
);
",
        shape = vector_literal(&q.query_shape),
        color = vector_literal(&q.query_color),
        obama = vector_literal(&q.obama),
        bush = vector_literal(&q.bush),
    )
}
