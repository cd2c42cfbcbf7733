import os
import json
from typing import Union, Dict, Any, List


def save_content(file_path: str, content: Union[str, Dict[str, Any], List[Any]]):
    """
    保存运行产物（JSON 摘要或纯文本）到指定文件

    Args:
        file_path (str): 保存文件的路径
        content (Union[str, Dict, List]): dict / list 写为缩进 JSON，其余按文本写入
    """
    # 确保目录存在
    if os.path.dirname(file_path):
        os.makedirs(os.path.dirname(file_path), exist_ok=True)

    if isinstance(content, (dict, list)):
        text = json.dumps(content, ensure_ascii=False, indent=2, sort_keys=False)
    else:
        text = str(content)

    with open(file_path, "w", encoding="utf-8") as f:
        f.write(text)
        if not text.endswith("\n"):
            f.write("\n")

