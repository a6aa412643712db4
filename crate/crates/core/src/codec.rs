//! Lossless mapping between canonical quantized meshes and flat integer
//! sequences, plus special-token packing for the autoregressive stage.
//!
//! Each face becomes a 9-tuple of coordinate bins laid out as
//! (z, y, x) per vertex, three vertices in canonical face order, so the
//! vertex sort key is visible directly in the raw sequence.

use crate::mesh::{canonicalize, MeshError, QuantizedMesh};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("mesh has {n_faces} faces, exceeding the {max_faces} face limit")]
    TooManyFaces { n_faces: usize, max_faces: usize },
    #[error("mesh must be canonicalized before encoding")]
    NotCanonical,
    #[error("bin {bin} out of range for {n_bins} bins (face {face}, slot {slot})")]
    BinOutOfRange { face: usize, slot: usize, bin: u32, n_bins: u32 },
    #[error("empty face sequence")]
    Empty,
    #[error("token sequence needs {needed} slots but max_len is {max_len}")]
    Overflow { needed: usize, max_len: usize },
    #[error("decoded mesh is invalid: {0}")]
    Mesh(#[from] MeshError),
}

/// Canonically ordered faces as 9-tuples of coordinate bins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSequence {
    pub faces: Vec<[u32; 9]>,
    pub n_bins: u32,
}

impl FaceSequence {
    /// Total coordinate count: 9 per face.
    pub fn len_coords(&self) -> usize {
        self.faces.len() * 9
    }

    /// Flat bin stream in face order.
    pub fn flat(&self) -> Vec<u32> {
        self.faces.iter().flatten().copied().collect()
    }
}

/// Flattens a canonical quantized mesh into a face sequence.
pub fn mesh_to_face_sequence(
    qmesh: &QuantizedMesh,
    max_faces: usize,
) -> Result<FaceSequence, CodecError> {
    if !qmesh.canonical {
        return Err(CodecError::NotCanonical);
    }
    if qmesh.faces.len() > max_faces {
        return Err(CodecError::TooManyFaces { n_faces: qmesh.faces.len(), max_faces });
    }
    let faces = qmesh
        .faces
        .iter()
        .map(|f| {
            let mut tuple = [0u32; 9];
            for (vi, &v) in f.iter().enumerate() {
                let [z, y, x] = QuantizedMesh::zyx_key(qmesh.vertices[v]);
                tuple[vi * 3] = z;
                tuple[vi * 3 + 1] = y;
                tuple[vi * 3 + 2] = x;
            }
            tuple
        })
        .collect();
    Ok(FaceSequence { faces, n_bins: qmesh.n_bins })
}

/// Result of decoding a face sequence: degenerate faces (repeated vertex
/// bins within one face) are dropped and flagged rather than rejected,
/// since generated sequences may contain them.
#[derive(Debug, Clone)]
pub struct DecodedMesh {
    pub mesh: QuantizedMesh,
    pub dropped_degenerate: usize,
}

/// Rebuilds a canonical quantized mesh from a face sequence, deduplicating
/// vertices by exact bin equality.
pub fn face_sequence_to_mesh(
    seq: &FaceSequence,
    n_bins: u32,
) -> Result<DecodedMesh, CodecError> {
    if seq.faces.is_empty() {
        return Err(CodecError::Empty);
    }
    let mut vertices: Vec<[u32; 3]> = Vec::new();
    let mut lookup = std::collections::HashMap::new();
    let mut faces = Vec::with_capacity(seq.faces.len());
    let mut dropped = 0usize;

    for (fi, tuple) in seq.faces.iter().enumerate() {
        let mut idx = [0usize; 3];
        for vi in 0..3 {
            let (z, y, x) = (tuple[vi * 3], tuple[vi * 3 + 1], tuple[vi * 3 + 2]);
            for (slot, &b) in [z, y, x].iter().enumerate() {
                if b >= n_bins {
                    return Err(CodecError::BinOutOfRange {
                        face: fi,
                        slot: vi * 3 + slot,
                        bin: b,
                        n_bins,
                    });
                }
            }
            let key = [x, y, z]; // stored as [x, y, z]
            idx[vi] = *lookup.entry(key).or_insert_with(|| {
                vertices.push(key);
                vertices.len() - 1
            });
        }
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            dropped += 1;
            continue;
        }
        faces.push(idx);
    }
    if faces.is_empty() {
        return Err(CodecError::Empty);
    }

    let raw = QuantizedMesh { vertices, faces, n_bins, canonical: false };
    let mesh = canonicalize(&raw)?;
    Ok(DecodedMesh { mesh, dropped_degenerate: dropped })
}

/// Special tokens appended to a mesh-token vocabulary of size `vocab`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialTokens {
    pub bos: u32,
    pub eos: u32,
    pub pad: u32,
}

impl SpecialTokens {
    /// BOS, EOS, PAD directly after the payload vocabulary.
    pub fn after_vocab(vocab: u32) -> SpecialTokens {
        SpecialTokens { bos: vocab, eos: vocab + 1, pad: vocab + 2 }
    }

    /// Total vocabulary including specials.
    pub fn total_vocab(&self, vocab: u32) -> u32 {
        debug_assert_eq!(self.bos, vocab);
        vocab + 3
    }
}

/// `[BOS, payload.., EOS, PAD..]` padded to `max_len`, with a supervision
/// mask over positions holding real targets (payload tokens and EOS; BOS
/// and PAD are never predicted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<u32>,
    pub loss_mask: Vec<bool>,
    pub specials: SpecialTokens,
}

impl TokenSequence {
    /// Linear-scan validity check: exactly one BOS at position 0, exactly
    /// one EOS, no payload after EOS, no PAD before EOS.
    pub fn is_valid(&self) -> bool {
        let s = self.specials;
        if self.tokens.first() != Some(&s.bos) {
            return false;
        }
        let Some(eos_pos) = self.tokens.iter().position(|&t| t == s.eos) else {
            return false;
        };
        for (i, &t) in self.tokens.iter().enumerate() {
            if i > 0 && t == s.bos {
                return false;
            }
            if i < eos_pos && t == s.pad {
                return false;
            }
            if i > eos_pos && t != s.pad {
                return false;
            }
        }
        true
    }

    /// Payload tokens between BOS and EOS.
    pub fn payload(&self) -> &[u32] {
        let eos = self.tokens.iter().position(|&t| t == self.specials.eos);
        match eos {
            Some(e) => &self.tokens[1..e],
            None => &self.tokens[1..],
        }
    }
}

/// Packs mesh tokens for next-token training.
pub fn pack_training_sequence(
    mesh_tokens: &[u32],
    max_len: usize,
    specials: SpecialTokens,
) -> Result<TokenSequence, CodecError> {
    let needed = mesh_tokens.len() + 2;
    if needed > max_len {
        return Err(CodecError::Overflow { needed, max_len });
    }
    let mut tokens = Vec::with_capacity(max_len);
    let mut loss_mask = Vec::with_capacity(max_len);
    tokens.push(specials.bos);
    loss_mask.push(false);
    for &t in mesh_tokens {
        tokens.push(t);
        loss_mask.push(true);
    }
    tokens.push(specials.eos);
    loss_mask.push(true);
    while tokens.len() < max_len {
        tokens.push(specials.pad);
        loss_mask.push(false);
    }
    Ok(TokenSequence { tokens, loss_mask, specials })
}

/// Serializes a token stream as newline-delimited decimals after a header
/// naming the vocabulary and special ids:
/// `# vocab <v> bos <b> eos <e> pad <p>`.
pub fn write_token_file(tokens: &[u32], vocab: u32, specials: SpecialTokens) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# vocab {} bos {} eos {} pad {}",
        vocab, specials.bos, specials.eos, specials.pad
    );
    for t in tokens {
        let _ = writeln!(out, "{t}");
    }
    out
}

/// Parses the [`write_token_file`] format.
pub fn read_token_file(text: &str) -> Option<(Vec<u32>, u32, SpecialTokens)> {
    let mut lines = text.lines();
    let header = lines.next()?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 9 || fields[0] != "#" || fields[1] != "vocab" {
        return None;
    }
    let vocab: u32 = fields[2].parse().ok()?;
    let bos: u32 = fields[4].parse().ok()?;
    let eos: u32 = fields[6].parse().ok()?;
    let pad: u32 = fields[8].parse().ok()?;
    let tokens = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse().ok())
        .collect::<Option<Vec<u32>>>()?;
    Some((tokens, vocab, SpecialTokens { bos, eos, pad }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{canonicalize, normalize_to_unit_box, quantize};
    use crate::toydata::generate_corpus;

    fn canonical_box() -> QuantizedMesh {
        let item = crate::toydata::generate_one(crate::toydata::Family::Box, 11);
        let n = normalize_to_unit_box(&item.mesh).unwrap();
        canonicalize(&quantize(&n, 128).unwrap()).unwrap()
    }

    #[test]
    fn single_face_roundtrip() {
        let q = QuantizedMesh {
            vertices: vec![[0, 0, 0], [5, 1, 0], [2, 7, 0]],
            faces: vec![[0, 1, 2]],
            n_bins: 16,
            canonical: false,
        };
        let c = canonicalize(&q).unwrap();
        let seq = mesh_to_face_sequence(&c, 800).unwrap();
        assert_eq!(seq.faces.len(), 1);
        let back = face_sequence_to_mesh(&seq, 16).unwrap();
        assert_eq!(back.mesh, c);
        assert_eq!(back.dropped_degenerate, 0);
    }

    #[test]
    fn box_first_face_contains_minimal_vertex() {
        let c = canonical_box();
        let seq = mesh_to_face_sequence(&c, 800).unwrap();
        assert_eq!(seq.faces.len(), c.faces.len());
        // First face contains the z-y-x minimal vertex, which is vertex 0
        // of the canonical mesh; its (z,y,x) key opens the sequence.
        let key = QuantizedMesh::zyx_key(c.vertices[0]);
        assert_eq!(&seq.faces[0][0..3], &key);
    }

    #[test]
    fn refuses_non_canonical_and_too_many_faces() {
        let q = QuantizedMesh {
            vertices: vec![[0, 0, 0], [5, 1, 0], [2, 7, 0]],
            faces: vec![[0, 1, 2]],
            n_bins: 16,
            canonical: false,
        };
        assert!(matches!(mesh_to_face_sequence(&q, 800), Err(CodecError::NotCanonical)));
        let c = canonicalize(&q).unwrap();
        assert!(matches!(
            mesh_to_face_sequence(&c, 0),
            Err(CodecError::TooManyFaces { .. })
        ));
    }

    #[test]
    fn corpus_roundtrip_is_exact() {
        let (train, eval) = generate_corpus(60, 5, 0.1);
        for item in train.iter().chain(&eval) {
            let q = canonicalize(&quantize(&item.mesh, 128).unwrap()).unwrap();
            let seq = mesh_to_face_sequence(&q, 800).unwrap();
            assert_eq!(seq.len_coords(), 9 * q.faces.len());
            let back = face_sequence_to_mesh(&seq, 128).unwrap();
            assert_eq!(back.mesh, q, "family {:?}", item.spec.family);
            assert_eq!(back.dropped_degenerate, 0);
        }
    }

    #[test]
    fn degenerate_faces_dropped_with_flag() {
        let mut seq = FaceSequence {
            faces: vec![[0, 0, 0, 1, 1, 1, 2, 2, 2], [3, 3, 3, 3, 3, 3, 4, 4, 4]],
            n_bins: 16,
        };
        let out = face_sequence_to_mesh(&seq, 16).unwrap();
        assert_eq!(out.dropped_degenerate, 1);
        assert_eq!(out.mesh.faces.len(), 1);

        seq.faces.remove(0);
        // Only a degenerate face left: nothing decodable.
        assert!(matches!(face_sequence_to_mesh(&seq, 16), Err(CodecError::Empty)));
    }

    #[test]
    fn out_of_range_bin_rejected() {
        let seq = FaceSequence { faces: vec![[0, 0, 0, 1, 1, 1, 99, 2, 2]], n_bins: 16 };
        assert!(matches!(
            face_sequence_to_mesh(&seq, 16),
            Err(CodecError::BinOutOfRange { bin: 99, .. })
        ));
    }

    #[test]
    fn packing_layout() {
        let sp = SpecialTokens::after_vocab(256);
        let seq = pack_training_sequence(&[5, 7], 6, sp).unwrap();
        assert_eq!(seq.tokens, vec![256, 5, 7, 257, 258, 258]);
        assert_eq!(seq.loss_mask, vec![false, true, true, true, false, false]);
        assert!(seq.is_valid());
        assert_eq!(seq.payload(), &[5, 7]);

        let empty = pack_training_sequence(&[], 4, sp).unwrap();
        assert_eq!(empty.tokens, vec![256, 257, 258, 258]);

        assert!(matches!(
            pack_training_sequence(&[1, 2, 3, 4, 5], 6, sp),
            Err(CodecError::Overflow { needed: 7, max_len: 6 })
        ));
    }

    #[test]
    fn validity_scan_rejects_malformed() {
        let sp = SpecialTokens::after_vocab(16);
        let good = pack_training_sequence(&[1, 2], 6, sp).unwrap();
        assert!(good.is_valid());

        let mut no_bos = good.clone();
        no_bos.tokens[0] = 1;
        assert!(!no_bos.is_valid());

        let mut tok_after_eos = good.clone();
        tok_after_eos.tokens[4] = 3;
        assert!(!tok_after_eos.is_valid());

        let mut pad_before_eos = good.clone();
        pad_before_eos.tokens[2] = sp.pad;
        assert!(!pad_before_eos.is_valid());
    }

    #[test]
    fn token_file_roundtrip() {
        let sp = SpecialTokens::after_vocab(256);
        let tokens = vec![256, 1, 2, 3, 257];
        let text = write_token_file(&tokens, 256, sp);
        let (back, vocab, sp2) = read_token_file(&text).unwrap();
        assert_eq!(back, tokens);
        assert_eq!(vocab, 256);
        assert_eq!(sp2, sp);
    }
}
