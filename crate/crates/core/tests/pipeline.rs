use trashpile::classifier::{MockClassifier, Palette};
use trashpile::geometry::Rect;
use trashpile::pipeline::{detect, match_and_score};
use trashpile::scene::{five_blob_layout, ground_truth, render_blobs, Blob};
use trashpile::{ClassLabel, PipelineConfig, RasterImage};

const WHITE: [u8; 3] = [255, 255, 255];

/// Density that makes `choose_k` return `k` for a `w × h` image.
fn density_for(k: usize, w: u32, h: u32) -> f64 {
    k as f64 / (w as f64 * h as f64 / 1e6)
}

#[test]
fn blank_scene_has_no_points() {
    let img = RasterImage::filled(512, 384, WHITE);
    let det = detect(&img, &MockClassifier::default(), &PipelineConfig::default()).unwrap();
    assert!(det.points.is_empty());
    assert!(det.objects.is_empty());
    assert!(det.mixture.is_none());
}

#[test]
fn single_paper_blob() {
    let blob = Blob::new(ClassLabel::Paper, 150, 100, 220, 200);
    let palette = Palette::default();
    let img = render_blobs(512, 384, WHITE, &[blob], &palette);
    let cfg = PipelineConfig {
        clusters_per_megapixel: density_for(1, 512, 384),
        ..Default::default()
    };
    let det = detect(&img, &MockClassifier::new(palette).unwrap(), &cfg).unwrap();
    assert!(det.points.len() >= 4, "{} points", det.points.len());
    assert_eq!(det.objects.len(), 1);
    assert_eq!(det.objects[0].label, ClassLabel::Paper);
    assert!(blob.rect.contains_point(det.objects[0].center));
}

#[test]
fn five_blob_scene_is_recovered() {
    let blobs = five_blob_layout();
    let palette = Palette::default();
    let img = render_blobs(1024, 768, WHITE, &blobs, &palette);
    let cfg = PipelineConfig {
        clusters_per_megapixel: density_for(5, 1024, 768),
        ..Default::default()
    };
    let det = detect(&img, &MockClassifier::new(palette).unwrap(), &cfg).unwrap();
    assert_eq!(det.objects.len(), 5);
    for b in &blobs {
        let hits: Vec<_> = det.objects.iter().filter(|o| b.rect.contains_point(o.center)).collect();
        assert_eq!(hits.len(), 1, "blob {:?}", b);
        assert_eq!(hits[0].label, b.label);
    }
    let report = match_and_score(&det.objects, &ground_truth("five", &blobs));
    assert_eq!(report.detection_rate, 1.0);
    assert!(report.rows.iter().all(|r| r.correctly_identified == r.total && r.identified == r.total));
}

#[test]
fn detection_is_deterministic_across_thread_counts() {
    let blobs = five_blob_layout();
    let img = render_blobs(1024, 768, WHITE, &blobs, &Palette::default());
    let cfg = PipelineConfig {
        clusters_per_megapixel: 8.0,
        ..Default::default()
    };
    let clf = MockClassifier::default();
    let a = detect(&img, &clf, &cfg).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = single.install(|| detect(&img, &clf, &cfg).unwrap());
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn centers_lie_inside_the_image() {
    let palette = Palette::default();
    let blobs: Vec<Blob> = (0..6)
        .map(|i| Blob::new(ClassLabel::ALL[i], (i as u32 * 97) % 400, (i as u32 * 61) % 250, 150, 130))
        .collect();
    let img = render_blobs(600, 400, [250, 250, 250], &blobs, &palette);
    for overlap in [0.0, 0.5, 0.75] {
        let cfg = PipelineConfig {
            window_w: 96,
            window_h: 64,
            overlap,
            clusters_per_megapixel: 30.0,
            min_support: 1,
            ..Default::default()
        };
        let det = detect(&img, &MockClassifier::new(palette).unwrap(), &cfg).unwrap();
        for o in &det.objects {
            assert!(Rect::new(0, 0, 600, 400).contains_point(o.center));
            assert!(o.ellipse.a >= o.ellipse.b && o.ellipse.b > 0.0);
        }
    }
}

#[test]
fn invalid_config_is_reported() {
    let img = RasterImage::filled(100, 100, WHITE);
    let err = detect(&img, &MockClassifier::default(), &PipelineConfig::default()).unwrap_err();
    assert!(err.to_string().contains("window_w"), "{err}");
}

#[test]
fn tone_adjustment_reaches_the_classifier() {
    // A dim glass blob that only reads as glass once brightened back.
    let palette = Palette::default();
    let blob = Blob::new(ClassLabel::Glass, 64, 64, 256, 256);
    let img = render_blobs(384, 384, WHITE, &[blob], &palette);
    let base = PipelineConfig {
        clusters_per_megapixel: density_for(1, 384, 384),
        ..Default::default()
    };
    let dark = PipelineConfig {
        brightness_factor: 0.2,
        ..base.clone()
    };
    let clf = MockClassifier::new(palette).unwrap();
    let normal = detect(&img, &clf, &base).unwrap();
    let dimmed = detect(&img, &clf, &dark).unwrap();
    assert_eq!(normal.objects[0].label, ClassLabel::Glass);
    assert_ne!(
        normal.points.iter().map(|p| p.label).collect::<Vec<_>>(),
        dimmed.points.iter().map(|p| p.label).collect::<Vec<_>>()
    );
}
