//! Loads small hand-built ONNX graphs through the exported-model adapter.

use std::path::Path;

use prost::Message;
use tract_onnx::pb::{
    self, tensor_shape_proto::dimension::Value as DimValue, tensor_shape_proto::Dimension,
    type_proto, AttributeProto, GraphProto, ModelProto, NodeProto, OperatorSetIdProto,
    TensorProto, TensorShapeProto, TypeProto, ValueInfoProto,
};
use trashpile::classifier::{
    load_exported_model, ClassifierError, ExportedModelClassifier, ModelMetadata, TileClassifier,
};
use trashpile::{ClassLabel, RasterImage};

const FLOAT: i32 = 1;

fn value_info(name: &str, dims: &[i64]) -> ValueInfoProto {
    ValueInfoProto {
        name: name.into(),
        r#type: Some(TypeProto {
            value: Some(type_proto::Value::TensorType(type_proto::Tensor {
                elem_type: FLOAT,
                shape: Some(TensorShapeProto {
                    dim: dims
                        .iter()
                        .map(|&d| Dimension {
                            value: Some(DimValue::DimValue(d)),
                            ..Default::default()
                        })
                        .collect(),
                }),
            })),
            ..Default::default()
        }),
        ..Default::default()
    }
}

fn node(op: &str, inputs: &[&str], output: &str, attribute: Vec<AttributeProto>) -> NodeProto {
    NodeProto {
        op_type: op.into(),
        name: output.into(),
        input: inputs.iter().map(|s| s.to_string()).collect(),
        output: vec![output.into()],
        attribute,
        ..Default::default()
    }
}

/// `logits = W · mean_rgb(input) + bias`, via GlobalAveragePool → Flatten → Gemm.
fn linear_color_model(weights: &[[f32; 3]], bias: &[f32], h: i64, w: i64) -> Vec<u8> {
    let outputs = weights.len() as i64;
    let graph = GraphProto {
        name: "color-head".into(),
        node: vec![
            node("GlobalAveragePool", &["input"], "pooled", vec![]),
            node("Flatten", &["pooled"], "features", vec![]),
            node(
                "Gemm",
                &["features", "weight", "bias"],
                "logits",
                vec![AttributeProto {
                    name: "transB".into(),
                    r#type: pb::attribute_proto::AttributeType::Int as i32,
                    i: 1,
                    ..Default::default()
                }],
            ),
        ],
        initializer: vec![
            TensorProto {
                name: "weight".into(),
                dims: vec![outputs, 3],
                data_type: FLOAT,
                float_data: weights.iter().flatten().copied().collect(),
                ..Default::default()
            },
            TensorProto {
                name: "bias".into(),
                dims: vec![outputs],
                data_type: FLOAT,
                float_data: bias.to_vec(),
                ..Default::default()
            },
        ],
        input: vec![value_info("input", &[1, 3, h, w])],
        output: vec![value_info("logits", &[1, outputs])],
        ..Default::default()
    };
    ModelProto {
        ir_version: 7,
        opset_import: vec![OperatorSetIdProto {
            domain: String::new(),
            version: 13,
        }],
        producer_name: "test".into(),
        graph: Some(graph),
        ..Default::default()
    }
    .encode_to_vec()
}

fn metadata(order: &[&str], w: u32, h: u32) -> ModelMetadata {
    ModelMetadata {
        format_version: 1,
        input_w: w,
        input_h: h,
        channel_means: [0.0; 3],
        channel_stds: [1.0; 3],
        class_order: order.iter().map(|s| s.to_string()).collect(),
    }
}

const CANONICAL: [&str; 6] = ["cardboard", "glass", "metal", "paper", "plastic", "trash"];

/// Red → cardboard, blue → glass, green → paper; the rest stay at zero.
fn canonical_weights() -> Vec<[f32; 3]> {
    vec![
        [10.0, -5.0, -5.0],
        [-5.0, -5.0, 10.0],
        [0.0; 3],
        [-5.0, 10.0, -5.0],
        [0.0; 3],
        [0.0; 3],
    ]
}

fn write_pair(dir: &Path, model: &[u8], meta: &ModelMetadata) -> (std::path::PathBuf, std::path::PathBuf) {
    let mp = dir.join("model.onnx");
    let jp = dir.join("model.json");
    std::fs::write(&mp, model).unwrap();
    std::fs::write(&jp, serde_json::to_string(meta).unwrap()).unwrap();
    (mp, jp)
}

fn loaded() -> ExportedModelClassifier {
    let dir = tempfile::tempdir().unwrap();
    let (m, j) = write_pair(
        dir.path(),
        &linear_color_model(&canonical_weights(), &[0.0; 6], 16, 24),
        &metadata(&CANONICAL, 24, 16),
    );
    load_exported_model(m, j).unwrap()
}

#[test]
fn classifies_by_color() {
    let clf = loaded();
    for (rgb, want) in [
        ([230, 10, 10], ClassLabel::Cardboard),
        ([10, 10, 230], ClassLabel::Glass),
        ([10, 230, 10], ClassLabel::Paper),
    ] {
        // Tiles of any size are resized to the model input.
        let scores = clf.classify(&RasterImage::filled(100, 70, rgb)).unwrap();
        assert_eq!(scores.top().0, want);
        assert!((scores.probs().iter().sum::<f64>() - 1.0).abs() < 1e-6);
        assert!(scores.probs().iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn matches_closed_form_softmax() {
    let clf = loaded();
    let tile = RasterImage::filled(24, 16, [51, 102, 204]);
    let mean = [0.2f64, 0.4, 0.8];
    let logits: Vec<f64> = canonical_weights()
        .iter()
        .map(|w| (0..3).map(|c| w[c] as f64 * mean[c]).sum())
        .collect();
    let z: f64 = logits.iter().map(|l| l.exp()).sum();
    let scores = clf.classify(&tile).unwrap();
    for (i, l) in logits.iter().enumerate() {
        assert!((scores.probs()[i] - l.exp() / z).abs() < 1e-5);
    }
}

#[test]
fn output_order_is_remapped_to_canonical_codes() {
    let mut order = CANONICAL;
    order.reverse();
    let mut weights = canonical_weights();
    weights.reverse();
    let dir = tempfile::tempdir().unwrap();
    let (m, j) = write_pair(dir.path(), &linear_color_model(&weights, &[0.0; 6], 8, 8), &metadata(&order, 8, 8));
    let clf = load_exported_model(m, j).unwrap();
    let tile = RasterImage::filled(8, 8, [240, 5, 5]);
    assert_eq!(clf.classify(&tile).unwrap().top().0, ClassLabel::Cardboard);
    let a = clf.classify(&tile).unwrap();
    let b = loaded().classify(&tile).unwrap();
    for (x, y) in a.probs().iter().zip(b.probs()) {
        assert!((x - y).abs() < 1e-6);
    }
}

#[test]
fn repeated_and_concurrent_calls_agree_bitwise() {
    let clf = loaded();
    let tile = RasterImage::from_fn(30, 20, |x, y| [(x * 8) as u8, (y * 12) as u8, 90]);
    let first = clf.classify(&tile).unwrap();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| clf.classify(&tile).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for r in results {
        assert_eq!(r.probs().map(f64::to_bits), first.probs().map(f64::to_bits));
    }
}

#[test]
fn five_class_metadata_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (m, j) = write_pair(
        dir.path(),
        &linear_color_model(&canonical_weights(), &[0.0; 6], 8, 8),
        &metadata(&CANONICAL[..5], 8, 8),
    );
    assert!(matches!(load_exported_model(m, j), Err(ClassifierError::ClassOrder(_))));
}

#[test]
fn text_file_is_not_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let (m, j) = write_pair(dir.path(), b"definitely not protobuf", &metadata(&CANONICAL, 8, 8));
    assert!(matches!(load_exported_model(&m, &j), Err(ClassifierError::ModelLoad(_))));
    assert!(matches!(
        load_exported_model(dir.path().join("missing.onnx"), &j),
        Err(ClassifierError::ModelLoad(_))
    ));
}

#[test]
fn wrong_output_width_is_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let weights = &canonical_weights()[..4];
    let (m, j) = write_pair(dir.path(), &linear_color_model(weights, &[0.0; 4], 8, 8), &metadata(&CANONICAL, 8, 8));
    assert!(matches!(load_exported_model(m, j), Err(ClassifierError::ModelLoad(_))));
}

#[test]
fn bad_metadata_file() {
    let dir = tempfile::tempdir().unwrap();
    let (m, j) = write_pair(
        dir.path(),
        &linear_color_model(&canonical_weights(), &[0.0; 6], 8, 8),
        &metadata(&CANONICAL, 8, 8),
    );
    std::fs::write(&j, "{\"format_version\":1}").unwrap();
    assert!(matches!(load_exported_model(&m, &j), Err(ClassifierError::Metadata(_))));
}
