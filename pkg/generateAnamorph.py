import argparse
import sys

import pyanamorph

parser = argparse.ArgumentParser()
parser.add_argument('--image', type=str, default='./input.png', help='source image path')
parser.add_argument('--output_path', type=str, default='./output/', help='output path')
parser.add_argument('--output_name', type=str, default='anamorph.png', help='output file name')
parser.add_argument('--kind', type=str, default='erect', help='erect, 3d or flat')
parser.add_argument('--dpi', type=float, default=300, help='print resolution')
parser.add_argument('--sheet', type=str, default='a4', help='a4 or letter')
args = parser.parse_args()

status = pyanamorph.main([
    'anamorph',
    '--kind', args.kind,
    '--image', args.image,
    '--dpi', str(args.dpi),
    '--sheet', args.sheet,
    '--out', args.output_path + args.output_name,
])
print('anamorph', args.kind, ',', args.output_path + args.output_name, 'saved' if status == 0 else 'failed')
sys.exit(status)
