"""Quantization, entropy coding and the FEZC container."""

from .codec import (QT, TQ, CompressedBlob, Header, LevelHeader, Order, RDRow, compress,
                    decompress, measure, rd_sweep)
from .quantize import QuantizerSpec, dequantize, dequantize_array, quantize, quantize_array
from .rangecoder import AdaptiveModel, decode_symbols, encode_symbols
from .schedule import LevelSchedule, make_schedule

__all__ = [
    "QT", "TQ", "CompressedBlob", "Header", "LevelHeader", "Order", "RDRow", "compress",
    "decompress", "measure", "rd_sweep", "QuantizerSpec", "dequantize", "dequantize_array",
    "quantize", "quantize_array", "AdaptiveModel", "decode_symbols", "encode_symbols",
    "LevelSchedule", "make_schedule",
]
